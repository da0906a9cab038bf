#include "mixest/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include <gtest/gtest.h>

#include "mixest/dictionary.hpp"
#include "mixest/rng.hpp"

namespace mixest {
namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;

Eigen::MatrixX2d normal_cloud(Rng& rng, Eigen::Index n, double sigma) {
  Eigen::MatrixX2d pts(n, 2);
  for (Eigen::Index i = 0; i < n; ++i) {
    pts(i, 0) = sigma * rng.normal();
    pts(i, 1) = sigma * rng.normal();
  }
  return pts;
}

TEST(Kde, DensityMatchesDirectFormula) {
  Eigen::MatrixX2d pts(3, 2);
  pts << 0.0, 0.0, 1.0, -1.0, 2.5, 0.5;
  const KdeModel model{pts, 0.7};
  Rng rng(17);
  for (int rep = 0; rep < 20; ++rep) {
    const double x = rng.uniform(-3.0, 3.0);
    const double y = rng.uniform(-3.0, 3.0);
    double acc = 0.0;
    for (int j = 0; j < 3; ++j) {
      const double dx = x - pts(j, 0);
      const double dy = y - pts(j, 1);
      acc += std::exp(-(dx * dx + dy * dy) / (2.0 * 0.7 * 0.7));
    }
    const double want = acc / (kTwoPi * 0.7 * 0.7 * 3.0);
    EXPECT_NEAR(model.density(SamplePoint::continuous(x, y)), want, 1e-14);
  }
  EXPECT_THROW(model.density(SamplePoint::categorical(0)), std::invalid_argument);
  EXPECT_THROW((KdeModel{Eigen::MatrixX2d(0, 2), 1.0})
                   .density(SamplePoint::continuous(0.0, 0.0)),
               std::logic_error);
}

TEST(Kde, DensityGridMatchesPointwiseAndIntegrates) {
  Rng rng(19);
  const KdeModel model{normal_cloud(rng, 25, 0.8), 0.5};
  const DomainBox box{-6.0, 6.0, -6.0, 6.0};
  const int side = 40;
  const Eigen::MatrixXd grid = model.density_grid(box, side);
  const Eigen::VectorXd xs = midpoint_grid(box.xmin, box.xmax, side);
  const Eigen::VectorXd ys = midpoint_grid(box.ymin, box.ymax, side);
  for (int b = 0; b < side; ++b) {
    for (int a = 0; a < side; ++a) {
      const double want = model.density(SamplePoint::continuous(xs(a), ys(b)));
      EXPECT_NEAR(grid(b, a), want, 1e-12 * std::max(1.0, want));
    }
  }
  // All kernels sit far from the box edge, so the grid mass is the full unit.
  const double cell = box.area() / (side * side);
  EXPECT_NEAR(grid.sum() * cell, 1.0, 1e-4);
}

TEST(FitKde, RecoversSaneBandwidthOnGaussianData) {
  Rng data_rng(23);
  const Eigen::MatrixX2d pts = normal_cloud(data_rng, 2000, 1.0);
  Rng split_rng(29);
  KdeFitReport report;
  const KdeModel model = fit_kde(pts, split_rng, 30, 0.01, 10.0, 0.2, &report);

  // Within a factor 3 of the 2-D Silverman rule h = sigma * n^(-1/6).
  const double silverman = std::pow(2000.0, -1.0 / 6.0);
  EXPECT_GT(model.bandwidth, silverman / 3.0);
  EXPECT_LT(model.bandwidth, silverman * 3.0);

  EXPECT_EQ(model.bandwidth, report.bandwidth);
  ASSERT_EQ(report.path.size(), 30u);
  EXPECT_DOUBLE_EQ(report.path.front().first, 0.01);
  EXPECT_DOUBLE_EQ(report.path.back().first, 10.0);
  // The reported score is the maximum over the path.
  double best = -std::numeric_limits<double>::infinity();
  for (const auto& [h, score] : report.path) best = std::max(best, score);
  EXPECT_DOUBLE_EQ(report.heldout_loglik, best);
  EXPECT_TRUE(std::isfinite(best));
  // The model refits on every sample.
  EXPECT_EQ(model.samples.rows(), 2000);
}

TEST(FitKde, DeterministicGivenSplitSeed) {
  Rng data_rng(31);
  const Eigen::MatrixX2d pts = normal_cloud(data_rng, 200, 1.0);
  Rng a(5), b(5);
  EXPECT_EQ(fit_kde(pts, a).bandwidth, fit_kde(pts, b).bandwidth);
}

TEST(FitKde, ValidatesArguments) {
  Rng rng(37);
  const Eigen::MatrixX2d few = normal_cloud(rng, 9, 1.0);
  Rng split(1);
  EXPECT_THROW(fit_kde(few, split), std::invalid_argument);
  const Eigen::MatrixX2d ok = normal_cloud(rng, 50, 1.0);
  EXPECT_THROW(fit_kde(ok, split, 0), std::invalid_argument);
  EXPECT_THROW(fit_kde(ok, split, 10, 0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(fit_kde(ok, split, 10, 1.0, 0.5), std::invalid_argument);
  EXPECT_THROW(fit_kde(ok, split, 10, 0.1, 1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(fit_kde(ok, split, 10, 0.1, 1.0, 1.0), std::invalid_argument);
}

TEST(Knn, RawScoreMatchesBruteForceRadius) {
  Rng rng(41);
  const Eigen::MatrixX2d pts = normal_cloud(rng, 40, 1.5);
  const DomainBox box{-5.0, 5.0, -5.0, 5.0};
  const KnnModel model = fit_knn(pts, box, 5, 1e-6, 50);
  EXPECT_EQ(model.k, 5);
  for (int rep = 0; rep < 20; ++rep) {
    const double x = rng.uniform(-4.0, 4.0);
    const double y = rng.uniform(-4.0, 4.0);
    std::vector<double> d2(40);
    for (int j = 0; j < 40; ++j) {
      const double dx = x - pts(j, 0);
      const double dy = y - pts(j, 1);
      d2[static_cast<std::size_t>(j)] = dx * dx + dy * dy;
    }
    std::sort(d2.begin(), d2.end());
    const double want = 1.0 / (3.141592653589793 * (d2[4] + 1e-6));
    const double got = model.raw_score(SamplePoint::continuous(x, y));
    EXPECT_NEAR(got, want, 1e-12 * want);
  }
}

TEST(Knn, DefaultKAndNormalization) {
  Rng rng(43);
  const Eigen::MatrixX2d pts = normal_cloud(rng, 40, 1.0);
  const DomainBox box{-5.0, 5.0, -5.0, 5.0};
  const KnnModel model = fit_knn(pts, box, 0, 1e-6, 80);
  EXPECT_EQ(model.k, 7);  // ceil(sqrt(40))

  // The normalizer is the quadrature mass of the raw score, so the density
  // integrates to one over the same grid by construction.
  const double cell = box.area() / (80.0 * 80.0);
  EXPECT_NEAR(model.score_grid.sum() * cell / model.normalizer, 1.0, 1e-12);
  // density() rescales raw_score by the normalizer.
  const SamplePoint q = SamplePoint::continuous(0.3, -0.7);
  EXPECT_NEAR(model.density(q), model.raw_score(q) / model.normalizer, 1e-15);
}

TEST(Knn, ValidatesArguments) {
  Rng rng(47);
  const Eigen::MatrixX2d pts = normal_cloud(rng, 10, 1.0);
  const DomainBox box{-5.0, 5.0, -5.0, 5.0};
  EXPECT_THROW(fit_knn(Eigen::MatrixX2d(0, 2), box), std::invalid_argument);
  EXPECT_THROW(fit_knn(pts, box, 11), std::invalid_argument);
  EXPECT_THROW(fit_knn(pts, box, -1), std::invalid_argument);
  EXPECT_THROW(fit_knn(pts, box, 2, 0.0), std::invalid_argument);
  EXPECT_THROW(fit_knn(pts, box, 2, 1e-6, 1), std::invalid_argument);
  const KnnModel model = fit_knn(pts, box, 3);
  EXPECT_THROW(model.raw_score(SamplePoint::categorical(1)), std::invalid_argument);
}

TEST(AddConstant, ClosedFormAndExactUnitSum) {
  Eigen::VectorXd counts(3);
  counts << 3.0, 0.0, 1.0;
  const AddConstantModel laplace = fit_add_constant(counts, 1.0);
  EXPECT_NEAR(laplace.pmf(0), 4.0 / 7.0, 1e-15);
  EXPECT_NEAR(laplace.pmf(1), 1.0 / 7.0, 1e-15);
  EXPECT_NEAR(laplace.pmf(2), 2.0 / 7.0, 1e-15);
  EXPECT_EQ(laplace.pmf.sum(), 1.0);  // exact by residual fold

  const AddConstantModel half = fit_add_constant(counts, 0.5);
  EXPECT_NEAR(half.pmf(1), 0.5 / 5.5, 1e-15);

  // c = 0 is plain maximum likelihood, legal only with full support.
  Eigen::VectorXd full(3);
  full << 2.0, 1.0, 1.0;
  const AddConstantModel ml = fit_add_constant(full, 0.0);
  EXPECT_NEAR(ml.pmf(0), 0.5, 1e-15);
  EXPECT_THROW(fit_add_constant(counts, 0.0), ConfigError);
  EXPECT_THROW(fit_add_constant(Eigen::VectorXd::Zero(3), 0.0), ConfigError);
}

TEST(AddConstant, ValidatesArguments) {
  Eigen::VectorXd counts(3);
  counts << 1.0, 2.0, 3.0;
  EXPECT_THROW(fit_add_constant(Eigen::VectorXd::Ones(1), 1.0), std::invalid_argument);
  EXPECT_THROW(fit_add_constant(counts, -0.5), std::invalid_argument);
  Eigen::VectorXd neg(3);
  neg << 1.0, -1.0, 2.0;
  EXPECT_THROW(fit_add_constant(neg, 1.0), std::invalid_argument);
}

TEST(CountSymbols, PrefixSemanticsAndValidation) {
  std::vector<SamplePoint> stream = {
      SamplePoint::categorical(0), SamplePoint::categorical(2),
      SamplePoint::categorical(2), SamplePoint::categorical(1)};
  const Eigen::VectorXd two = count_symbols(stream, 2, 4);
  EXPECT_EQ(two(0), 1.0);
  EXPECT_EQ(two(1), 0.0);
  EXPECT_EQ(two(2), 1.0);
  const Eigen::VectorXd all = count_symbols(stream, 4, 4);
  EXPECT_EQ(all.sum(), 4.0);
  EXPECT_EQ(all(2), 2.0);
  EXPECT_EQ(count_symbols(stream, 0, 4).sum(), 0.0);

  EXPECT_THROW(count_symbols(stream, 5, 4), std::invalid_argument);
  EXPECT_THROW(count_symbols(stream, 4, 2), std::invalid_argument);
  stream[1] = SamplePoint::continuous(0.0, 0.0);
  EXPECT_THROW(count_symbols(stream, 4, 4), std::invalid_argument);
}

}  // namespace
}  // namespace mixest
