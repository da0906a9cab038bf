#include "mixest/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <vector>

#include "mixest/dictionary.hpp"

namespace mixest {

namespace {

constexpr double kPi = 3.141592653589793238462643383279;
constexpr double kTwoPi = 2.0 * kPi;

}  // namespace

double KdeModel::density(const SamplePoint& zeta) const {
  if (zeta.is_categorical()) {
    throw std::invalid_argument("KdeModel::density: categorical point");
  }
  const Eigen::Index n = samples.rows();
  if (n == 0) throw std::logic_error("KdeModel::density: empty model");
  const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
  double acc = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    const double dx = zeta.x - samples(j, 0);
    const double dy = zeta.y - samples(j, 1);
    acc += std::exp(-(dx * dx + dy * dy) * inv2h2);
  }
  return acc / (kTwoPi * bandwidth * bandwidth * static_cast<double>(n));
}

Eigen::MatrixXd KdeModel::density_grid(const DomainBox& box, int grid_side) const {
  const Eigen::Index n = samples.rows();
  if (n == 0) throw std::logic_error("KdeModel::density_grid: empty model");
  const Eigen::VectorXd xs = midpoint_grid(box.xmin, box.xmax, grid_side);
  const Eigen::VectorXd ys = midpoint_grid(box.ymin, box.ymax, grid_side);
  const double inv2h2 = 1.0 / (2.0 * bandwidth * bandwidth);
  Eigen::MatrixXd kx(n, grid_side), ky(n, grid_side);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (int a = 0; a < grid_side; ++a) {
      const double dx = xs(a) - samples(j, 0);
      kx(j, a) = std::exp(-dx * dx * inv2h2);
      const double dy = ys(a) - samples(j, 1);
      ky(j, a) = std::exp(-dy * dy * inv2h2);
    }
  }
  const double scale = 1.0 / (kTwoPi * bandwidth * bandwidth * static_cast<double>(n));
  return scale * (ky.transpose() * kx);
}

KdeModel fit_kde(const Eigen::MatrixX2d& samples, Rng& split_rng,
                 int bandwidth_grid, double h_min, double h_max,
                 double holdout_fraction, KdeFitReport* report) {
  const Eigen::Index n = samples.rows();
  if (n < 10) {
    throw std::invalid_argument("fit_kde: need at least 10 samples, got " +
                                std::to_string(n));
  }
  if (bandwidth_grid < 1) throw std::invalid_argument("fit_kde: empty bandwidth grid");
  if (!(h_min > 0.0) || !(h_max >= h_min)) {
    throw std::invalid_argument("fit_kde: invalid bandwidth range");
  }
  if (!(holdout_fraction > 0.0) || !(holdout_fraction < 1.0)) {
    throw std::invalid_argument("fit_kde: holdout_fraction must lie in (0,1)");
  }

  // Seeded shuffle; the tail of the permutation is the holdout split.
  std::vector<Eigen::Index> perm(static_cast<std::size_t>(n));
  std::iota(perm.begin(), perm.end(), 0);
  for (Eigen::Index i = n - 1; i > 0; --i) {
    const auto j = static_cast<Eigen::Index>(split_rng.uniform_int(0, i));
    std::swap(perm[static_cast<std::size_t>(i)], perm[static_cast<std::size_t>(j)]);
  }
  Eigen::Index n_hold = std::clamp<Eigen::Index>(
      static_cast<Eigen::Index>(std::llround(holdout_fraction * static_cast<double>(n))),
      1, n - 1);
  const Eigen::Index n_train = n - n_hold;

  Eigen::MatrixX2d train(n_train, 2), hold(n_hold, 2);
  for (Eigen::Index i = 0; i < n_train; ++i) train.row(i) = samples.row(perm[static_cast<std::size_t>(i)]);
  for (Eigen::Index i = 0; i < n_hold; ++i) hold.row(i) = samples.row(perm[static_cast<std::size_t>(n_train + i)]);

  std::vector<double> hs(static_cast<std::size_t>(bandwidth_grid));
  if (bandwidth_grid == 1) {
    hs[0] = h_min;
  } else {
    const double step = (std::log(h_max) - std::log(h_min)) / (bandwidth_grid - 1);
    for (int i = 0; i < bandwidth_grid; ++i) hs[static_cast<std::size_t>(i)] = std::exp(std::log(h_min) + i * step);
    hs.front() = h_min;
    hs.back() = h_max;
  }

  // Blocked held-out scoring: squared distances for a block of holdout rows
  // are computed once and reused across the whole bandwidth grid.
  std::vector<double> scores(hs.size(), 0.0);
  constexpr Eigen::Index kBlock = 512;
  Eigen::MatrixXd d2(kBlock, n_train);
  for (Eigen::Index start = 0; start < n_hold; start += kBlock) {
    const Eigen::Index rows = std::min(kBlock, n_hold - start);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index j = 0; j < n_train; ++j) {
        const double dx = hold(start + r, 0) - train(j, 0);
        const double dy = hold(start + r, 1) - train(j, 1);
        d2(r, j) = dx * dx + dy * dy;
      }
    }
    for (std::size_t hi = 0; hi < hs.size(); ++hi) {
      const double h = hs[hi];
      const double inv2h2 = 1.0 / (2.0 * h * h);
      const double log_norm = -std::log(kTwoPi * h * h * static_cast<double>(n_train));
      double acc = 0.0;
      for (Eigen::Index r = 0; r < rows; ++r) {
        double kernel_sum = 0.0;
        for (Eigen::Index j = 0; j < n_train; ++j) {
          kernel_sum += std::exp(-d2(r, j) * inv2h2);
        }
        acc += kernel_sum > 0.0 ? std::log(kernel_sum) + log_norm
                                : -std::numeric_limits<double>::infinity();
      }
      scores[hi] += acc;
    }
  }

  std::size_t best = hs.size();
  for (std::size_t hi = 0; hi < hs.size(); ++hi) {
    if (!std::isfinite(scores[hi])) continue;
    if (best == hs.size() || scores[hi] > scores[best]) best = hi;  // ties keep smaller h
  }
  if (best == hs.size()) {
    throw std::runtime_error("fit_kde: held-out likelihood is -inf at every bandwidth");
  }

  if (report != nullptr) {
    report->bandwidth = hs[best];
    report->heldout_loglik = scores[best] / static_cast<double>(n_hold);
    report->path.clear();
    for (std::size_t hi = 0; hi < hs.size(); ++hi) {
      report->path.emplace_back(hs[hi], scores[hi] / static_cast<double>(n_hold));
    }
  }

  KdeModel model;
  model.samples = samples;
  model.bandwidth = hs[best];
  return model;
}

namespace {

double knn_radius2(const Eigen::MatrixX2d& points, int k, double x, double y,
                   std::vector<double>& scratch) {
  const Eigen::Index n = points.rows();
  scratch.resize(static_cast<std::size_t>(n));
  for (Eigen::Index j = 0; j < n; ++j) {
    const double dx = x - points(j, 0);
    const double dy = y - points(j, 1);
    scratch[static_cast<std::size_t>(j)] = dx * dx + dy * dy;
  }
  auto kth = scratch.begin() + (k - 1);
  std::nth_element(scratch.begin(), kth, scratch.end());
  return *kth;
}

}  // namespace

double KnnModel::raw_score(const SamplePoint& zeta) const {
  if (zeta.is_categorical()) {
    throw std::invalid_argument("KnnModel::raw_score: categorical point");
  }
  if (points.rows() < k) {
    throw std::logic_error("KnnModel: fewer stored points than k");
  }
  std::vector<double> scratch;
  const double r2 = knn_radius2(points, k, zeta.x, zeta.y, scratch);
  return 1.0 / (kPi * (r2 + delta));
}

double KnnModel::density(const SamplePoint& zeta) const {
  return raw_score(zeta) / normalizer;
}

KnnModel fit_knn(const Eigen::MatrixX2d& points, const DomainBox& box, int k,
                 double delta, int grid_side) {
  const Eigen::Index n = points.rows();
  if (n < 1) throw std::invalid_argument("fit_knn: empty point set");
  if (k == 0) k = static_cast<int>(std::ceil(std::sqrt(static_cast<double>(n))));
  if (k < 1 || k > n) {
    throw std::invalid_argument("fit_knn: need 1 <= k <= n, got k = " +
                                std::to_string(k) + ", n = " + std::to_string(n));
  }
  if (!(delta > 0.0)) throw std::invalid_argument("fit_knn: delta must be positive");
  if (grid_side < 2) throw std::invalid_argument("fit_knn: grid_side < 2");

  KnnModel model;
  model.points = points;
  model.k = k;
  model.delta = delta;
  model.box = box;
  model.score_grid.resize(grid_side, grid_side);

  const double hx = box.width() / grid_side;
  const double hy = box.height() / grid_side;
  std::vector<double> scratch;
  for (int b = 0; b < grid_side; ++b) {
    const double y = box.ymin + (b + 0.5) * hy;
    for (int a = 0; a < grid_side; ++a) {
      const double x = box.xmin + (a + 0.5) * hx;
      const double r2 = knn_radius2(points, k, x, y, scratch);
      model.score_grid(b, a) = 1.0 / (kPi * (r2 + delta));
    }
  }
  model.normalizer = model.score_grid.sum() * box.area() /
                     (static_cast<double>(grid_side) * grid_side);
  return model;
}

AddConstantModel fit_add_constant(const Eigen::VectorXd& counts, double c) {
  const Eigen::Index k = counts.size();
  if (k < 2) throw std::invalid_argument("fit_add_constant: need K >= 2 symbols");
  if (!counts.allFinite() || (counts.array() < 0.0).any()) {
    throw std::invalid_argument("fit_add_constant: counts must be nonnegative");
  }
  if (c < 0.0) throw std::invalid_argument("fit_add_constant: c must be >= 0");
  const double n = counts.sum();
  const double denom = n + c * static_cast<double>(k);
  if (!(denom > 0.0)) {
    throw ConfigError("fit_add_constant: n + cK = 0 gives no distribution");
  }
  if (c == 0.0 && (counts.array() == 0.0).any()) {
    throw ConfigError("fit_add_constant: c = 0 requires every symbol observed");
  }
  AddConstantModel model;
  model.counts = counts;
  model.c = c;
  model.pmf = (counts.array() + c) / denom;
  // Fold the fp normalization residual into the largest entry: the pmf then
  // sums to 1 exactly.
  Eigen::Index argmax = 0;
  model.pmf.maxCoeff(&argmax);
  model.pmf(argmax) += 1.0 - model.pmf.sum();
  return model;
}

Eigen::VectorXd count_symbols(const std::vector<SamplePoint>& stream,
                              std::size_t prefix, Eigen::Index alphabet) {
  if (prefix > stream.size()) {
    throw std::invalid_argument("count_symbols: prefix longer than stream");
  }
  Eigen::VectorXd counts = Eigen::VectorXd::Zero(alphabet);
  for (std::size_t i = 0; i < prefix; ++i) {
    const SamplePoint& zeta = stream[i];
    if (!zeta.is_categorical() || zeta.symbol >= alphabet) {
      throw std::invalid_argument("count_symbols: non-categorical or out-of-range sample");
    }
    counts(static_cast<Eigen::Index>(zeta.symbol)) += 1.0;
  }
  return counts;
}

}  // namespace mixest
