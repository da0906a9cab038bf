#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "mixest/dictionary.hpp"
#include "mixest/rng.hpp"
#include "mixest/simplex.hpp"

namespace mixest {

/// Expectation table for the mixture log-loss: component values at reference
/// atoms with atom weights. Continuous references use an i.i.d. sample set
/// (weights 1/n); categorical references use the exact pmf restricted to its
/// support (the empirical expectation replaced by the exact one). Built once
/// per experiment and shared by every estimator so all comparisons use the
/// same Q*.
class ReferenceTable {
 public:
  static ReferenceTable from_samples(const Dictionary& dict,
                                     std::span<const SamplePoint> samples);
  static ReferenceTable from_pmf(const Dictionary& dict, const Eigen::VectorXd& pmf);

  Eigen::Index atoms() const { return values_.rows(); }
  Eigen::Index components() const { return values_.cols(); }
  bool exact() const { return exact_; }

  /// F(m) = −Σ_r w_r·log(Σ_i m_i f_i(ζ_r)), the empirical/exact log-loss.
  double objective(const WeightVector& m) const;

  /// Objective and its gradient ∇F_i = −Σ_r w_r f_i(ζ_r)/Q(ζ_r).
  double objective_and_gradient(const WeightVector& m, Eigen::VectorXd& grad) const;

  /// Second-moment matrix H(m) = Σ_r w_r g_r g_rᵀ of score vectors.
  Eigen::MatrixXd score_second_moment(const WeightVector& m) const;

 private:
  Eigen::MatrixXd values_;  // atoms × M
  Eigen::VectorXd weights_;
  bool exact_ = false;
};

/// Best-in-class solve result. `converged` is false when the iteration cap
/// was reached before the gradient-mapping norm fell under tolerance (the
/// result is still returned, flagged, never thrown).
struct BestInClass {
  WeightVector weights;
  double objective = 0.0;
  int iterations = 0;
  double grad_mapping_norm = 0.0;
  bool converged = false;
};

/// Minimizes the mixture log-loss over Δ_M from the uniform start by the EM
/// fixed-point iteration on the proportions (Dempster, Laird and Rubin 1977):
/// m ← m ∘ E[f/Q]. Each update is monotone without any line search and stays
/// exactly normalized because ⟨m, E[f/Q]⟩ = 1. Stops when the unit-step
/// gradient-mapping norm ‖prox₁(m) − m‖₁ < tolerance. A support-polish pass
/// zeroes negligible weights when that does not worsen the objective, so
/// vertex optima are returned exactly.
BestInClass solve_best_in_class(const Dictionary& dict, const ReferenceTable& ref,
                                double tolerance = 1e-8, int max_iterations = 100000);

/// Strong-convexity estimate: min over probe points of λ_min(H(m)), H the
/// score second-moment matrix over the reference. `degenerate` flags any
/// probe with λ_min ≤ 1e-10 (Assumption 1 likely violated).
struct NuEstimate {
  double value = 0.0;
  std::vector<double> per_probe;
  bool degenerate = false;
};

NuEstimate estimate_nu(const Dictionary& dict, const ReferenceTable& ref,
                       std::span<const WeightVector> m_grid);

/// Default probe grid: uniform m plus `random_count` random interior points
/// (Dirichlet(1), seeded).
std::vector<WeightVector> default_nu_probes(Eigen::Index m, int random_count,
                                            std::uint64_t seed);

/// Midpoint-rule KL between two densities on a box, over cells with
/// p > 1e-12, q floored at 1e-300. `value_half` is the same estimate at half
/// resolution (Richardson-style convergence diagnostic).
struct KlQuadrature {
  double value = 0.0;
  double value_half = 0.0;
};

KlQuadrature kl_continuous(const std::function<double(double, double)>& p,
                           const std::function<double(double, double)>& q,
                           const DomainBox& box, int grid_side = 400);

/// Same quadrature rule for densities already tabulated on matching
/// midpoint grids.
double kl_between_grids(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q,
                        const DomainBox& box);

/// Prop. 1: R_φ·G_∞/√N.
double bound_proposition1(double r_phi, double g_inf, std::int64_t n);
/// Thm. 1 (appendix proof form): max{2·a0, 8·G_∞²/ν²}/(N+1), a0 = ½‖m0−m*‖².
double bound_theorem1(double a0, double g_inf, double nu, std::int64_t n);
/// Thm. 2 (appendix form): max{kl0, 2·G_∞²/ν²}/(N+1), kl0 = KL(m*‖m0).
double bound_theorem2(double kl0, double g_inf, double nu, std::int64_t n);

/// Least-squares line through (log N, log metric). Nonpositive or non-finite
/// metrics are dropped; fewer than 5 surviving points is invalid-input.
struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  int points_used = 0;
};

RateFit fit_rate(std::span<const std::pair<double, double>> n_and_metric);

}  // namespace mixest
