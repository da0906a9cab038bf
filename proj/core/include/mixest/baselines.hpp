#pragma once

#include <vector>

#include <Eigen/Core>

#include "mixest/common.hpp"
#include "mixest/rng.hpp"

namespace mixest {

/// Gaussian-kernel density estimate with a single isotropic bandwidth.
struct KdeModel {
  Eigen::MatrixX2d samples;
  double bandwidth = 1.0;

  /// (1/n)·Σ_j (1/(2πh²))·exp(−‖ζ−x_j‖²/(2h²)); not renormalized to any box.
  double density(const SamplePoint& zeta) const;

  /// Density on an n × n midpoint grid over `box` (row = y, col = x) via
  /// separable axis profiles (one GEMM).
  Eigen::MatrixXd density_grid(const DomainBox& box, int grid_side) const;
};

/// Bandwidth-selection trace: per-grid-point (h, held-out mean log-likelihood).
struct KdeFitReport {
  double bandwidth = 0.0;
  double heldout_loglik = 0.0;
  std::vector<std::pair<double, double>> path;
};

/// Cross-validated bandwidth fit: seeded holdout split, log-spaced bandwidth
/// grid, argmax of held-out mean log-likelihood (ties toward smaller h),
/// refit on all samples. Throws std::runtime_error if every bandwidth gives
/// −inf held-out likelihood.
KdeModel fit_kde(const Eigen::MatrixX2d& samples, Rng& split_rng,
                 int bandwidth_grid = 30, double h_min = 0.01, double h_max = 10.0,
                 double holdout_fraction = 0.2, KdeFitReport* report = nullptr);

/// k-nearest-neighbor density P̂(ζ) ∝ 1/(π(r_k(ζ)² + δ)), normalized over the
/// domain box by midpoint quadrature at fit time. Brute-force neighbor search.
struct KnnModel {
  Eigen::MatrixX2d points;
  int k = 1;
  double delta = 1e-6;
  DomainBox box;
  double normalizer = 1.0;     // integral of the raw score over the box
  Eigen::MatrixXd score_grid;  // raw scores at the normalization grid cells

  /// Unnormalized score 1/(π(r_k² + δ)).
  double raw_score(const SamplePoint& zeta) const;

  /// raw_score / normalizer (a proper density on the box).
  double density(const SamplePoint& zeta) const;
};

/// k = 0 selects the ⌈√n⌉ default. Throws std::invalid_argument if fewer
/// than k points are supplied.
KnnModel fit_knn(const Eigen::MatrixX2d& points, const DomainBox& box, int k = 0,
                 double delta = 1e-6, int grid_side = 400);

/// Add-a-constant (Laplace for c = 1) categorical smoothing:
/// pmf_j = (count_j + c)/(n + cK).
struct AddConstantModel {
  Eigen::VectorXd counts;
  double c = 1.0;
  Eigen::VectorXd pmf;
};

AddConstantModel fit_add_constant(const Eigen::VectorXd& counts, double c = 1.0);

/// Convenience: per-symbol counts of a categorical sample prefix.
Eigen::VectorXd count_symbols(const std::vector<SamplePoint>& stream,
                              std::size_t prefix, Eigen::Index alphabet);

}  // namespace mixest
