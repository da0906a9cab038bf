#include "support/grid_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mixest::testing {

namespace {

// Scans the simplex slice x1 in [lo1, hi1], x2 in [lo2, hi2] (m = 3) or just
// x1 (m = 2), with the last coordinate determined by the unit sum.
void scan(int m, const std::function<double(const Eigen::VectorXd&)>& f,
          double lo1, double hi1, double lo2, double hi2, double step,
          Eigen::VectorXd& best, double& best_val) {
  Eigen::VectorXd x(m);
  for (double x1 = std::max(lo1, 0.0); x1 <= std::min(hi1, 1.0) + 1e-15;
       x1 += step) {
    if (m == 2) {
      x << x1, 1.0 - x1;
      const double v = f(x);
      if (v < best_val) {
        best_val = v;
        best = x;
      }
      continue;
    }
    const double hi2_here = std::min(hi2, 1.0 - x1);
    for (double x2 = std::max(lo2, 0.0); x2 <= hi2_here + 1e-15; x2 += step) {
      x << x1, x2, 1.0 - x1 - x2;
      if (x(2) < -1e-12) continue;
      x(2) = std::max(x(2), 0.0);
      const double v = f(x);
      if (v < best_val) {
        best_val = v;
        best = x;
      }
    }
  }
}

}  // namespace

Eigen::VectorXd grid_minimize_simplex(
    int m, const std::function<double(const Eigen::VectorXd&)>& f,
    double coarse_step, int levels) {
  if (m != 2 && m != 3) {
    throw std::invalid_argument("grid_minimize_simplex: m must be 2 or 3");
  }
  Eigen::VectorXd best = Eigen::VectorXd::Constant(m, 1.0 / m);
  double best_val = std::numeric_limits<double>::infinity();
  double step = coarse_step;
  scan(m, f, 0.0, 1.0, 0.0, 1.0, step, best, best_val);
  for (int level = 0; level < levels; ++level) {
    const double window = 2.0 * step;
    step /= 10.0;
    scan(m, f, best(0) - window, best(0) + window,
         m == 3 ? best(1) - window : 0.0, m == 3 ? best(1) + window : 1.0, step,
         best, best_val);
  }
  return best;
}

Eigen::VectorXd fd_gradient(const std::function<double(const Eigen::VectorXd&)>& f,
                            const Eigen::VectorXd& x, double h) {
  Eigen::VectorXd g(x.size());
  Eigen::VectorXd p = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double xi = x(i);
    p(i) = xi + h;
    const double up = f(p);
    p(i) = xi - h;
    const double down = f(p);
    p(i) = xi;
    g(i) = (up - down) / (2.0 * h);
  }
  return g;
}

}  // namespace mixest::testing
