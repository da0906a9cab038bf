#pragma once

// Brute-force oracles shared by the unit and acceptance tests: simplex grid
// minimization (for prox and best-in-class cross-checks) and central finite
// differences.

#include <functional>

#include <Eigen/Dense>

namespace mixest::testing {

/// Minimizes f over the probability simplex Δ_m (m = 2 or 3) by multilevel
/// grid refinement: a full scan at `coarse_step`, then `levels` rounds that
/// shrink the window around the incumbent by 10x each. The final grid pitch
/// is coarse_step/10^levels, which bounds the argmin error.
Eigen::VectorXd grid_minimize_simplex(
    int m, const std::function<double(const Eigen::VectorXd&)>& f,
    double coarse_step = 0.02, int levels = 3);

/// Central finite-difference gradient with step h.
Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double h = 1e-6);

}  // namespace mixest::testing
