#include "mixest/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace mixest {

WeightVector::WeightVector(Eigen::VectorXd w) : w_(std::move(w)) {
  if (w_.size() < 2) {
    throw std::invalid_argument("WeightVector: need M >= 2, got M = " +
                                std::to_string(w_.size()));
  }
  if (!w_.allFinite()) {
    throw std::invalid_argument("WeightVector: non-finite entry");
  }
  if ((w_.array() < 0.0).any()) {
    throw std::invalid_argument("WeightVector: negative entry " +
                                std::to_string(w_.minCoeff()));
  }
  const double sum = w_.sum();
  if (!(sum > 0.0) || !std::isfinite(sum)) {
    throw std::invalid_argument("WeightVector: entries sum to " +
                                std::to_string(sum));
  }
  w_ /= sum;
}

WeightVector WeightVector::uniform(Eigen::Index m) {
  return WeightVector(Eigen::VectorXd::Constant(m, 1.0 / static_cast<double>(m)));
}

WeightVector WeightVector::vertex(Eigen::Index m, Eigen::Index j) {
  Eigen::VectorXd w = Eigen::VectorXd::Zero(m);
  w(j) = 1.0;
  return WeightVector(std::move(w));
}

WeightVector WeightVector::from_normalized(Eigen::VectorXd w) {
  return WeightVector(std::move(w), Unchecked{});
}

WeightVector WeightVector::floored(double floor) const {
  Eigen::VectorXd w = w_.cwiseMax(floor);
  w /= w.sum();
  w = w.cwiseMax(floor);
  return WeightVector(std::move(w), Unchecked{});
}

WeightVector project_simplex(const Eigen::VectorXd& v) {
  const Eigen::Index m = v.size();
  if (m < 2) {
    throw std::invalid_argument("project_simplex: need M >= 2");
  }
  if (!v.allFinite()) {
    throw std::invalid_argument("project_simplex: non-finite input");
  }
  // Points already on the simplex project to themselves; returning the input
  // bit-for-bit makes the projection exactly idempotent.
  if (v.minCoeff() >= 0.0 && std::abs(v.sum() - 1.0) <= 1e-12) {
    return WeightVector::from_normalized(v);
  }
  std::vector<double> u(v.data(), v.data() + m);
  std::sort(u.begin(), u.end(), std::greater<double>());
  double css = 0.0;
  double theta = 0.0;
  for (Eigen::Index j = 0; j < m; ++j) {
    css += u[static_cast<std::size_t>(j)];
    const double cand = (css - 1.0) / static_cast<double>(j + 1);
    if (u[static_cast<std::size_t>(j)] - cand > 0.0) theta = cand;
  }
  return WeightVector((v.array() - theta).cwiseMax(0.0).matrix());
}

double kl_divergence(const WeightVector& p, const WeightVector& q) {
  if (p.size() != q.size()) {
    throw std::invalid_argument("kl_divergence: dimension mismatch");
  }
  double kl = 0.0;
  for (Eigen::Index i = 0; i < p.size(); ++i) {
    const double pi = p[i];
    if (pi <= 0.0) continue;
    const double qi = q[i];
    if (qi <= 0.0) return std::numeric_limits<double>::infinity();
    kl += pi * std::log(pi / qi);
  }
  return std::max(kl, 0.0);
}

double MirrorMap::phi(const WeightVector& x) const {
  if (kind_ == MirrorKind::Euclidean) return 0.5 * x.vec().squaredNorm();
  double s = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] > 0.0) s += x[i] * std::log(x[i]);
  }
  return s;
}

Eigen::VectorXd MirrorMap::grad_phi(const WeightVector& x) const {
  if (kind_ == MirrorKind::Euclidean) return x.vec();
  if ((x.vec().array() <= 0.0).any()) {
    throw std::domain_error(
        "grad_phi: entropy gradient undefined on the simplex boundary");
  }
  return (x.vec().array().log() + 1.0).matrix();
}

double MirrorMap::bregman(const WeightVector& x, const WeightVector& y) const {
  if (x.size() != y.size()) {
    throw std::invalid_argument("bregman: dimension mismatch");
  }
  if (kind_ == MirrorKind::Euclidean) {
    return 0.5 * (x.vec() - y.vec()).squaredNorm();
  }
  // For normalized inputs the entropy Bregman divergence reduces to KL;
  // shares kl_divergence's +inf convention at the boundary.
  return kl_divergence(x, y);
}

double MirrorMap::r_phi(Eigen::Index m) const {
  if (m < 2) throw std::invalid_argument("r_phi: need M >= 2");
  const double md = static_cast<double>(m);
  if (kind_ == MirrorKind::Euclidean) return std::sqrt((md - 1.0) / (2.0 * md));
  return std::sqrt(std::log(md));
}

}  // namespace mixest
