#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "mixest/common.hpp"
#include "mixest/simplex.hpp"

namespace mixest {

/// One layer of the multi-scale Gaussian grid: grid_side × grid_side centers
/// spanning the domain box (edges included), all with bandwidth sigma.
struct GridLayer {
  int grid_side = 1;
  double sigma = 1.0;
};

/// Component values f_i(ζ) alongside the mixture density Q(ζ) = Σ m_i f_i(ζ).
/// The mixture is floored at 1e-300 so it is always a usable divisor.
struct DensityEvaluation {
  Eigen::VectorXd values;
  double mixture = 0.0;
};

/// G_∞ bound on score-vector entries. For Gaussian grids the sup-ratio can
/// overflow double (spike vs. wide kernels across the box), so the log is
/// carried separately; `value` may be +inf while `log_value` stays finite.
/// `grid_side` records the evaluation grid used (0 = exact closed form).
struct GInfEstimate {
  double value = 0.0;
  double log_value = 0.0;
  int grid_side = 0;
};

enum class DictionaryKind { GaussianGrid, Categorical };

/// The fixed component family {f_i}_{i∈[M]}. Immutable after construction;
/// evaluation is pure and thread-safe.
class Dictionary {
 public:
  /// Isotropic Gaussians (§V Eq. (7) normalization 1/(2πσ²)) on evenly
  /// spaced per-layer grids over `box`, edges included. Construction checks
  /// that every component whose ±4σ ball lies inside the box integrates to 1
  /// over the box within 1e-3 (Gaussian-CDF closed form); components nearer
  /// the edge are flagged truncated and exempt.
  static Dictionary multiscale_gaussian(const DomainBox& box,
                                        const std::vector<GridLayer>& layers);

  /// Smoothed point masses on K symbols: f_i(j) = (1−ε)·1{i=j} + ε/K.
  /// Every component is strictly positive, so Assumption 2 holds with
  /// G_∞ = (K(1−ε)+ε)/ε.
  static Dictionary categorical(std::int64_t num_symbols, double epsilon);

  DictionaryKind kind() const { return kind_; }
  bool is_categorical() const { return kind_ == DictionaryKind::Categorical; }
  Eigen::Index size() const { return m_; }
  const DomainBox& domain() const;
  std::int64_t alphabet_size() const;
  double epsilon() const;
  const Eigen::VectorXd& centers_x() const;
  const Eigen::VectorXd& centers_y() const;
  const Eigen::VectorXd& sigmas() const;
  const std::vector<bool>& edge_truncated() const;

  /// f(ζ) as a length-M vector.
  Eigen::VectorXd component_values(const SamplePoint& zeta) const;

  DensityEvaluation evaluate(const WeightVector& m, const SamplePoint& zeta) const;

  /// Score vector g_i = f_i(ζ)/Q(ζ). The loss gradient of log(1/Q) in m is
  /// −g; estimators apply the descent convention (see estimators module).
  /// Throws std::runtime_error if the mixture underflows past the 1e-300
  /// floor into a non-finite score.
  Eigen::VectorXd stochastic_gradient(const WeightVector& m,
                                      const SamplePoint& zeta) const;

  /// Assumption 2's bound: categorical → exact closed form; GaussianGrid →
  /// max over a grid_side × grid_side evaluation grid of
  /// max_i f_i(ζ) / min_j f_j(ζ), computed in log space.
  GInfEstimate g_infinity(int grid_side = 200) const;

  /// Separable evaluation support for grid quadrature: for column vectors of
  /// coordinates, returns an M × n matrix A with
  ///   f_i(x_a, y_b) = axis_profile(xs,0)(i,a) · axis_profile(ys,1)(i,b).
  /// The 1/(2πσ²) amplitude is split evenly between the two axes.
  Eigen::MatrixXd axis_profile(const Eigen::VectorXd& coords, int axis) const;

  /// Mixture density on an n × n midpoint grid over the domain box
  /// (row = y cell index, col = x cell index), via one GEMM through the
  /// axis profiles. GaussianGrid only.
  Eigen::MatrixXd mixture_grid(const WeightVector& m, int grid_side) const;

  /// Categorical only: the mixture pmf over symbols, Q(j) = (1−ε)m_j + ε/K.
  Eigen::VectorXd mixture_pmf(const WeightVector& m) const;

 private:
  Dictionary() = default;

  DictionaryKind kind_ = DictionaryKind::Categorical;
  Eigen::Index m_ = 0;

  // GaussianGrid state
  DomainBox box_;
  Eigen::VectorXd mu_x_, mu_y_, sigma_, amplitude_, inv_two_sigma2_;
  std::vector<bool> edge_truncated_;

  // Categorical state
  std::int64_t num_symbols_ = 0;
  double epsilon_ = 0.0;
};

/// Midpoint-rule cell centers for an n-cell subdivision of [lo, hi].
Eigen::VectorXd midpoint_grid(double lo, double hi, int cells);

}  // namespace mixest
