#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "mixest/common.hpp"
#include "mixest/rng.hpp"

namespace mixest {

enum class TargetKind { FourMode, WidePlusSpikes, SparseCategorical };
enum class CategoricalDecay { Uniform, Zipf };

/// A sharp Gaussian mode for the wide-plus-spikes target.
struct SpikeSpec {
  double x = 0.0;
  double y = 0.0;
  double sigma = 0.1;
};

/// Synthetic ground truth P*. Continuous kinds are equal-weight mixtures of
/// modes truncated to the domain box; each mode's in-box normalizer is
/// computed by 1000×1000 midpoint quadrature at construction and cached.
/// Immutable after construction; sampling takes an explicit Rng.
class Target {
 public:
  /// §V four-mode density on [−5,5]²: donut ring (radius 2.5, width 0.2),
  /// uniform square [−2.75,−1.25]×[1.25,2.75], correlated Gaussian at
  /// (2.5,2.5) with exponent −[2dx² − 3.5·dx·dy + 2dy²], and a σ=0.1 spike
  /// at (−2,−2); weights ¼ each.
  static Target four_mode();

  /// One wide Gaussian at the origin plus sharp spikes, equal weights
  /// 1/(1+|spikes|). Defaults: σ_wide = 2.0, four σ=0.1 spikes at (±3, ±3).
  static Target wide_plus_spikes();
  static Target wide_plus_spikes(double wide_sigma, std::vector<SpikeSpec> spikes);

  /// Probability mass on a seeded-random subset of `support` symbols out of
  /// K, uniform or Zipf(1.0)-decayed over the subset, zero elsewhere. The
  /// exact pmf is retained for exact-KL evaluation.
  static Target sparse_categorical(std::int64_t alphabet, std::int64_t support,
                                   CategoricalDecay decay, std::uint64_t seed);

  TargetKind kind() const { return kind_; }
  bool is_continuous() const { return kind_ != TargetKind::SparseCategorical; }
  const DomainBox& domain() const;
  std::int64_t alphabet_size() const;
  const Eigen::VectorXd& pmf() const;

  /// Normalized density (continuous) or pmf lookup (categorical).
  /// Throws std::invalid_argument for points outside the domain.
  double density(const SamplePoint& zeta) const;

  SamplePoint sample_one(Rng& rng) const;
  std::vector<SamplePoint> sample(Rng& rng, std::int64_t n) const;

  /// Density evaluated at the midpoint-grid cell centers (row = y index,
  /// col = x index). Continuous kinds only.
  Eigen::MatrixXd density_grid(int grid_side) const;

  /// Cached per-mode in-box normalizer (continuous kinds; mode indices follow
  /// construction order: four_mode → donut, square, diagonal, spike;
  /// wide_plus_spikes → wide, then spikes).
  double mode_normalizer(std::size_t mode) const;
  std::size_t mode_count() const { return normalizers_.size(); }

 private:
  Target() = default;
  double unnormalized_mode_density(std::size_t mode, double x, double y) const;
  void compute_normalizers();
  SamplePoint sample_mode(std::size_t mode, Rng& rng) const;

  TargetKind kind_ = TargetKind::FourMode;
  DomainBox box_;
  std::vector<double> normalizers_;

  // WidePlusSpikes state
  double wide_sigma_ = 2.0;
  std::vector<SpikeSpec> spikes_;

  // Diagonal-mode sampler state (four_mode): lower Cholesky factor of the
  // covariance (2A)^{-1} implied by the exponent quadratic form A.
  double chol_l11_ = 0.0, chol_l21_ = 0.0, chol_l22_ = 0.0;

  // SparseCategorical state
  std::int64_t alphabet_ = 0;
  Eigen::VectorXd pmf_;
  std::vector<double> cdf_;
};

}  // namespace mixest
