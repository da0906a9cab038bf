#include "mixest/targets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace mixest {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr int kNormalizerGrid = 1000;
constexpr int kMaxSampleAttempts = 100000;

// Four-mode constants (§V).
constexpr double kDonutRadius = 2.5;
constexpr double kDonutWidth = 0.2;
constexpr double kSquareX0 = -2.75, kSquareX1 = -1.25;
constexpr double kSquareY0 = 1.25, kSquareY1 = 2.75;
constexpr double kDiagCx = 2.5, kDiagCy = 2.5;
// Exponent quadratic form A: [2, -1.75; -1.75, 2].
constexpr double kDiagAxx = 2.0, kDiagAxy = -1.75, kDiagAyy = 2.0;
constexpr double kSpikeCx = -2.0, kSpikeCy = -2.0;
constexpr double kSpikeSigma = 0.1;

}  // namespace

Target Target::four_mode() {
  Target t;
  t.kind_ = TargetKind::FourMode;
  t.box_ = DomainBox{};
  t.normalizers_.assign(4, 0.0);

  // Sampler covariance for the diagonal mode: the density exp(−dᵀAd) is a
  // Gaussian with precision 2A, so Σ = (2A)^{-1}; factor it once.
  const double pxx = 2.0 * kDiagAxx, pxy = 2.0 * kDiagAxy, pyy = 2.0 * kDiagAyy;
  const double det = pxx * pyy - pxy * pxy;
  const double sxx = pyy / det, sxy = -pxy / det, syy = pxx / det;
  t.chol_l11_ = std::sqrt(sxx);
  t.chol_l21_ = sxy / t.chol_l11_;
  t.chol_l22_ = std::sqrt(syy - t.chol_l21_ * t.chol_l21_);

  t.compute_normalizers();
  return t;
}

Target Target::wide_plus_spikes() {
  return wide_plus_spikes(
      2.0, {{3.0, 3.0, 0.1}, {-3.0, 3.0, 0.1}, {3.0, -3.0, 0.1}, {-3.0, -3.0, 0.1}});
}

Target Target::wide_plus_spikes(double wide_sigma, std::vector<SpikeSpec> spikes) {
  if (!(wide_sigma > 0.0)) {
    throw ConfigError("wide_plus_spikes: wide_sigma must be positive");
  }
  if (spikes.empty()) {
    throw ConfigError("wide_plus_spikes: spike list must be nonempty");
  }
  Target t;
  t.kind_ = TargetKind::WidePlusSpikes;
  t.box_ = DomainBox{};
  t.wide_sigma_ = wide_sigma;
  for (const auto& s : spikes) {
    if (!(s.sigma > 0.0)) throw ConfigError("wide_plus_spikes: spike sigma must be positive");
    if (!t.box_.contains(s.x, s.y)) {
      throw ConfigError("wide_plus_spikes: spike center (" + std::to_string(s.x) +
                        ", " + std::to_string(s.y) + ") outside the domain box");
    }
  }
  t.spikes_ = std::move(spikes);
  t.normalizers_.assign(1 + t.spikes_.size(), 0.0);
  t.compute_normalizers();
  return t;
}

Target Target::sparse_categorical(std::int64_t alphabet, std::int64_t support,
                                  CategoricalDecay decay, std::uint64_t seed) {
  if (alphabet < 2) {
    throw ConfigError("sparse_categorical: alphabet size must be >= 2");
  }
  if (support < 1 || support > alphabet) {
    throw ConfigError("sparse_categorical: need 1 <= support <= alphabet, got support = " +
                      std::to_string(support) + ", alphabet = " +
                      std::to_string(alphabet));
  }
  Target t;
  t.kind_ = TargetKind::SparseCategorical;
  t.alphabet_ = alphabet;

  // Seeded support selection: partial Fisher-Yates over [0, K).
  Rng rng(seed);
  std::vector<std::int64_t> idx(static_cast<std::size_t>(alphabet));
  std::iota(idx.begin(), idx.end(), 0);
  for (std::int64_t i = 0; i < support; ++i) {
    const std::int64_t j = rng.uniform_int(i, alphabet - 1);
    std::swap(idx[static_cast<std::size_t>(i)], idx[static_cast<std::size_t>(j)]);
  }

  t.pmf_ = Eigen::VectorXd::Zero(alphabet);
  double total = 0.0;
  for (std::int64_t r = 0; r < support; ++r) {
    const double w = decay == CategoricalDecay::Uniform
                         ? 1.0
                         : 1.0 / static_cast<double>(r + 1);
    t.pmf_(idx[static_cast<std::size_t>(r)]) = w;
    total += w;
  }
  t.pmf_ /= total;
  // Fold the normalization residual into the largest entry so the pmf sums
  // to 1 exactly in double precision.
  Eigen::Index argmax = 0;
  t.pmf_.maxCoeff(&argmax);
  t.pmf_(argmax) += 1.0 - t.pmf_.sum();

  t.cdf_.resize(static_cast<std::size_t>(alphabet));
  double acc = 0.0;
  for (std::int64_t j = 0; j < alphabet; ++j) {
    acc += t.pmf_(j);
    t.cdf_[static_cast<std::size_t>(j)] = acc;
  }
  t.cdf_.back() = 1.0;
  return t;
}

const DomainBox& Target::domain() const {
  if (!is_continuous()) {
    throw std::logic_error("domain(): categorical target has no box");
  }
  return box_;
}

std::int64_t Target::alphabet_size() const {
  if (is_continuous()) {
    throw std::logic_error("alphabet_size(): continuous target");
  }
  return alphabet_;
}

const Eigen::VectorXd& Target::pmf() const {
  if (is_continuous()) {
    throw std::logic_error("pmf(): continuous target");
  }
  return pmf_;
}

double Target::unnormalized_mode_density(std::size_t mode, double x, double y) const {
  if (kind_ == TargetKind::FourMode) {
    switch (mode) {
      case 0: {
        const double r = std::sqrt(x * x + y * y);
        const double d = r - kDonutRadius;
        return std::exp(-d * d / (2.0 * kDonutWidth * kDonutWidth));
      }
      case 1:
        return x >= kSquareX0 && x <= kSquareX1 && y >= kSquareY0 && y <= kSquareY1
                   ? 1.0
                   : 0.0;
      case 2: {
        const double dx = x - kDiagCx;
        const double dy = y - kDiagCy;
        return std::exp(-(kDiagAxx * dx * dx + 2.0 * kDiagAxy * dx * dy +
                          kDiagAyy * dy * dy));
      }
      default: {
        const double dx = x - kSpikeCx;
        const double dy = y - kSpikeCy;
        return std::exp(-(dx * dx + dy * dy) / (2.0 * kSpikeSigma * kSpikeSigma));
      }
    }
  }
  // WidePlusSpikes: mode 0 is the wide Gaussian, then one mode per spike.
  if (mode == 0) {
    return std::exp(-(x * x + y * y) / (2.0 * wide_sigma_ * wide_sigma_));
  }
  const SpikeSpec& s = spikes_[mode - 1];
  const double dx = x - s.x;
  const double dy = y - s.y;
  return std::exp(-(dx * dx + dy * dy) / (2.0 * s.sigma * s.sigma));
}

void Target::compute_normalizers() {
  const int n = kNormalizerGrid;
  const double cell = box_.area() / (static_cast<double>(n) * n);
  const double hx = box_.width() / n;
  const double hy = box_.height() / n;
  std::vector<double> sums(normalizers_.size(), 0.0);
  for (int b = 0; b < n; ++b) {
    const double y = box_.ymin + (b + 0.5) * hy;
    for (int a = 0; a < n; ++a) {
      const double x = box_.xmin + (a + 0.5) * hx;
      for (std::size_t mode = 0; mode < sums.size(); ++mode) {
        sums[mode] += unnormalized_mode_density(mode, x, y);
      }
    }
  }
  for (std::size_t mode = 0; mode < sums.size(); ++mode) {
    normalizers_[mode] = sums[mode] * cell;
    if (!(normalizers_[mode] > 0.0)) {
      throw std::runtime_error("target mode " + std::to_string(mode) +
                               " has zero mass on the domain box");
    }
  }
}

double Target::mode_normalizer(std::size_t mode) const {
  if (mode >= normalizers_.size()) {
    throw std::invalid_argument("mode_normalizer: index out of range");
  }
  return normalizers_[mode];
}

double Target::density(const SamplePoint& zeta) const {
  if (!is_continuous()) {
    if (!zeta.is_categorical()) {
      throw std::invalid_argument("density: continuous point given to a categorical target");
    }
    if (zeta.symbol >= alphabet_) {
      throw std::invalid_argument("density: symbol " + std::to_string(zeta.symbol) +
                                  " out of range for alphabet " +
                                  std::to_string(alphabet_));
    }
    return pmf_(static_cast<Eigen::Index>(zeta.symbol));
  }
  if (zeta.is_categorical()) {
    throw std::invalid_argument("density: symbol given to a continuous target");
  }
  if (!box_.contains(zeta.x, zeta.y)) {
    throw std::invalid_argument("density: point (" + std::to_string(zeta.x) + ", " +
                                std::to_string(zeta.y) + ") outside the domain box");
  }
  const double weight = 1.0 / static_cast<double>(normalizers_.size());
  double p = 0.0;
  for (std::size_t mode = 0; mode < normalizers_.size(); ++mode) {
    p += weight * unnormalized_mode_density(mode, zeta.x, zeta.y) / normalizers_[mode];
  }
  return p;
}

SamplePoint Target::sample_mode(std::size_t mode, Rng& rng) const {
  if (kind_ == TargetKind::FourMode) {
    switch (mode) {
      case 0: {
        // The 2-D ring density has radial law r·N(r; 2.5, 0.2²); draw from
        // N(2.5, 0.2) and accept with probability r/5 (valid envelope for
        // r ∈ (0, 5]) to correct for the area element exactly.
        for (int attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
          const double r = rng.normal(kDonutRadius, kDonutWidth);
          if (r <= 0.0 || r > 5.0) continue;
          if (rng.uniform() * 5.0 >= r) continue;
          const double theta = rng.uniform() * kTwoPi;
          return SamplePoint::continuous(r * std::cos(theta), r * std::sin(theta));
        }
        throw std::runtime_error("donut sampler failed to accept a radius");
      }
      case 1:
        return SamplePoint::continuous(rng.uniform(kSquareX0, kSquareX1),
                                       rng.uniform(kSquareY0, kSquareY1));
      case 2: {
        const double z1 = rng.normal();
        const double z2 = rng.normal();
        return SamplePoint::continuous(kDiagCx + chol_l11_ * z1,
                                       kDiagCy + chol_l21_ * z1 + chol_l22_ * z2);
      }
      default:
        return SamplePoint::continuous(kSpikeCx + kSpikeSigma * rng.normal(),
                                       kSpikeCy + kSpikeSigma * rng.normal());
    }
  }
  if (mode == 0) {
    return SamplePoint::continuous(wide_sigma_ * rng.normal(),
                                   wide_sigma_ * rng.normal());
  }
  const SpikeSpec& s = spikes_[mode - 1];
  return SamplePoint::continuous(s.x + s.sigma * rng.normal(),
                                 s.y + s.sigma * rng.normal());
}

SamplePoint Target::sample_one(Rng& rng) const {
  if (!is_continuous()) {
    const double u = rng.uniform();
    const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
    const auto j = std::min<std::ptrdiff_t>(it - cdf_.begin(), alphabet_ - 1);
    return SamplePoint::categorical(static_cast<std::int64_t>(j));
  }
  const std::size_t modes = normalizers_.size();
  std::size_t mode = static_cast<std::size_t>(rng.uniform() * static_cast<double>(modes));
  if (mode >= modes) mode = modes - 1;
  // Truncation: redraw the selected mode until the point lands in the box,
  // matching the per-mode renormalized density.
  for (int attempt = 0; attempt < kMaxSampleAttempts; ++attempt) {
    const SamplePoint zeta = sample_mode(mode, rng);
    if (box_.contains(zeta.x, zeta.y)) return zeta;
  }
  throw std::runtime_error("target sampler failed to land in the domain box");
}

std::vector<SamplePoint> Target::sample(Rng& rng, std::int64_t n) const {
  if (n < 0) throw std::invalid_argument("sample: negative count");
  std::vector<SamplePoint> out;
  out.reserve(static_cast<std::size_t>(n));
  for (std::int64_t i = 0; i < n; ++i) out.push_back(sample_one(rng));
  return out;
}

Eigen::MatrixXd Target::density_grid(int grid_side) const {
  if (!is_continuous()) {
    throw std::logic_error("density_grid: categorical target");
  }
  if (grid_side < 1) throw std::invalid_argument("density_grid: grid_side < 1");
  Eigen::MatrixXd grid(grid_side, grid_side);
  const double hx = box_.width() / grid_side;
  const double hy = box_.height() / grid_side;
  for (int b = 0; b < grid_side; ++b) {
    const double y = box_.ymin + (b + 0.5) * hy;
    for (int a = 0; a < grid_side; ++a) {
      const double x = box_.xmin + (a + 0.5) * hx;
      grid(b, a) = density(SamplePoint::continuous(x, y));
    }
  }
  return grid;
}

}  // namespace mixest
