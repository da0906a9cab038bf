#include "mixest/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include <Eigen/Eigenvalues>

namespace mixest {

namespace {

constexpr double kCellPFloor = 1e-12;
constexpr double kQFloor = 1e-300;
constexpr Eigen::Index kMaxTableEntries = 250000000;

}  // namespace

ReferenceTable ReferenceTable::from_samples(const Dictionary& dict,
                                            std::span<const SamplePoint> samples) {
  if (samples.empty()) {
    throw std::invalid_argument("ReferenceTable: empty sample reference");
  }
  const auto n = static_cast<Eigen::Index>(samples.size());
  if (n * dict.size() > kMaxTableEntries) {
    throw std::runtime_error(
        "ReferenceTable: reference of " + std::to_string(n) + " samples x M = " +
        std::to_string(dict.size()) + " exceeds the in-memory table budget");
  }
  ReferenceTable t;
  t.values_.resize(n, dict.size());
  for (Eigen::Index r = 0; r < n; ++r) {
    t.values_.row(r) = dict.component_values(samples[static_cast<std::size_t>(r)]);
  }
  t.weights_ = Eigen::VectorXd::Constant(n, 1.0 / static_cast<double>(n));
  t.exact_ = false;
  return t;
}

ReferenceTable ReferenceTable::from_pmf(const Dictionary& dict,
                                        const Eigen::VectorXd& pmf) {
  if (!dict.is_categorical()) {
    throw std::invalid_argument("ReferenceTable::from_pmf: dictionary not categorical");
  }
  if (pmf.size() != dict.alphabet_size()) {
    throw std::invalid_argument("ReferenceTable::from_pmf: pmf length mismatch");
  }
  if ((pmf.array() < 0.0).any() || std::abs(pmf.sum() - 1.0) > 1e-9) {
    throw std::invalid_argument("ReferenceTable::from_pmf: not a pmf");
  }
  const Eigen::Index support =
      (pmf.array() > 0.0).count();
  if (support == 0) {
    throw std::invalid_argument("ReferenceTable::from_pmf: zero pmf");
  }
  ReferenceTable t;
  t.values_.resize(support, dict.size());
  t.weights_.resize(support);
  Eigen::Index r = 0;
  for (Eigen::Index j = 0; j < pmf.size(); ++j) {
    if (pmf(j) <= 0.0) continue;
    t.values_.row(r) = dict.component_values(SamplePoint::categorical(j));
    t.weights_(r) = pmf(j);
    ++r;
  }
  t.exact_ = true;
  return t;
}

double ReferenceTable::objective(const WeightVector& m) const {
  if (m.size() != components()) {
    throw std::invalid_argument("ReferenceTable::objective: weight length mismatch");
  }
  const Eigen::VectorXd q = values_ * m.vec();
  double val = 0.0;
  for (Eigen::Index r = 0; r < q.size(); ++r) {
    val -= weights_(r) * std::log(std::max(q(r), kQFloor));
  }
  return val;
}

double ReferenceTable::objective_and_gradient(const WeightVector& m,
                                              Eigen::VectorXd& grad) const {
  if (m.size() != components()) {
    throw std::invalid_argument("ReferenceTable: weight length mismatch");
  }
  Eigen::VectorXd q = values_ * m.vec();
  double val = 0.0;
  for (Eigen::Index r = 0; r < q.size(); ++r) {
    const double qr = std::max(q(r), kQFloor);
    val -= weights_(r) * std::log(qr);
    q(r) = weights_(r) / qr;  // reuse as the per-atom gradient weight
  }
  grad.noalias() = -(values_.transpose() * q);
  return val;
}

Eigen::MatrixXd ReferenceTable::score_second_moment(const WeightVector& m) const {
  if (m.size() != components()) {
    throw std::invalid_argument("ReferenceTable: weight length mismatch");
  }
  const Eigen::VectorXd q = values_ * m.vec();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(components(), components());
  Eigen::VectorXd g(components());
  for (Eigen::Index r = 0; r < q.size(); ++r) {
    const double qr = std::max(q(r), kQFloor);
    g = values_.row(r).transpose() / qr;
    h.selfadjointView<Eigen::Lower>().rankUpdate(g, weights_(r));
  }
  return h.selfadjointView<Eigen::Lower>();
}

namespace {

// Entropic mirror-descent update with max-subtracted logits.
Eigen::VectorXd md_update(const Eigen::VectorXd& m, const Eigen::VectorXd& grad,
                          double gamma) {
  Eigen::ArrayXd logits = m.array().log() - gamma * grad.array();
  // log(0) = -inf stays -inf through the shift: zero weights remain zero.
  logits -= logits.maxCoeff();
  Eigen::VectorXd w = logits.exp().matrix();
  w /= w.sum();
  return w;
}

}  // namespace

BestInClass solve_best_in_class(const Dictionary& dict, const ReferenceTable& ref,
                                double tolerance, int max_iterations) {
  if (ref.components() != dict.size()) {
    throw std::invalid_argument("solve_best_in_class: table/dictionary size mismatch");
  }
  if (!(tolerance > 0.0)) {
    throw std::invalid_argument("solve_best_in_class: tolerance must be positive");
  }

  // EM fixed-point iteration on the proportions (Dempster, Laird and Rubin
  // 1977): m ← m ∘ E[f/Q]. The multiplier is −∇F, so the update reuses the
  // gradient, descends monotonically without a line search, and stays exactly
  // normalized (⟨m, −∇F⟩ = Σ_r w_r = 1). A line search on F cannot certify
  // tolerances near machine precision (objective differences of order ν·d²
  // sink below the rounding noise of F long before the gradient mapping
  // reaches 1e-8); the comparison-free EM map has no such floor.
  Eigen::VectorXd m = Eigen::VectorXd::Constant(dict.size(), 1.0 / static_cast<double>(dict.size()));
  Eigen::VectorXd grad(dict.size());
  double val = 0.0;
  double crit = std::numeric_limits<double>::infinity();
  int iter = 0;
  bool converged = false;

  for (;;) {
    val = ref.objective_and_gradient(WeightVector::from_normalized(m), grad);
    // Unit-step gradient mapping as the convergence certificate.
    const Eigen::VectorXd probe = md_update(m, grad, 1.0);
    crit = (probe - m).cwiseAbs().sum();
    if (crit < tolerance) {
      converged = true;
      break;
    }
    if (iter >= max_iterations) break;
    m.array() *= -grad.array();
    m /= m.sum();
    ++iter;
  }

  // Support polish: exact zeros for negligible weights when that does not
  // hurt the objective. Keep the largest cut that passes; near-vertex optima
  // leave off-support mass of order √tolerance behind (the EM map only
  // contracts faces like 1/t), which the 1e-4 cut removes.
  WeightVector best = WeightVector::from_normalized(m);
  double best_val = ref.objective(best);
  for (const double cut : {1e-4, 1e-6, 1e-8, 1e-10}) {
    if (!(m.array() < cut).any() || !(m.array() >= cut).any()) continue;
    Eigen::VectorXd polished = (m.array() < cut).select(0.0, m.array());
    polished /= polished.sum();
    const WeightVector cand = WeightVector::from_normalized(polished);
    const double cand_val = ref.objective(cand);
    if (cand_val <= best_val + 1e-12) {
      best = cand;
      best_val = cand_val;
      break;
    }
  }

  BestInClass out{best, best_val, iter, crit, converged};
  return out;
}

NuEstimate estimate_nu(const Dictionary& dict, const ReferenceTable& ref,
                       std::span<const WeightVector> m_grid) {
  if (m_grid.empty()) {
    throw std::invalid_argument("estimate_nu: empty probe grid");
  }
  NuEstimate est;
  est.value = std::numeric_limits<double>::infinity();
  for (const WeightVector& probe : m_grid) {
    const Eigen::MatrixXd h = ref.score_second_moment(probe);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(h, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
      throw std::runtime_error("estimate_nu: eigensolve failed");
    }
    const double lmin = solver.eigenvalues().minCoeff();
    est.per_probe.push_back(lmin);
    est.value = std::min(est.value, lmin);
    if (lmin <= 1e-10) est.degenerate = true;
  }
  return est;
}

std::vector<WeightVector> default_nu_probes(Eigen::Index m, int random_count,
                                            std::uint64_t seed) {
  std::vector<WeightVector> probes;
  probes.push_back(WeightVector::uniform(m));
  Rng rng(seed);
  for (int t = 0; t < random_count; ++t) {
    Eigen::VectorXd w(m);
    for (Eigen::Index i = 0; i < m; ++i) {
      w(i) = -std::log(1.0 - rng.uniform());  // Exp(1) draws -> Dirichlet(1)
    }
    probes.push_back(WeightVector(w.cwiseMax(1e-300)));
  }
  return probes;
}

KlQuadrature kl_continuous(const std::function<double(double, double)>& p,
                           const std::function<double(double, double)>& q,
                           const DomainBox& box, int grid_side) {
  if (grid_side < 2) throw std::invalid_argument("kl_continuous: grid_side < 2");
  const auto eval = [&](int side) {
    const double hx = box.width() / side;
    const double hy = box.height() / side;
    const double cell = hx * hy;
    double kl = 0.0;
    for (int b = 0; b < side; ++b) {
      const double y = box.ymin + (b + 0.5) * hy;
      for (int a = 0; a < side; ++a) {
        const double x = box.xmin + (a + 0.5) * hx;
        const double pv = p(x, y);
        const double qv = q(x, y);
        if (pv < 0.0 || qv < 0.0 || !std::isfinite(pv) || !std::isfinite(qv)) {
          throw std::invalid_argument(
              "kl_continuous: negative or non-finite density at (" +
              std::to_string(x) + ", " + std::to_string(y) + ")");
        }
        if (pv <= kCellPFloor) continue;
        kl += cell * pv * std::log(pv / std::max(qv, kQFloor));
      }
    }
    return kl;
  };
  KlQuadrature out;
  out.value = eval(grid_side);
  out.value_half = eval(std::max(grid_side / 2, 2));
  return out;
}

double kl_between_grids(const Eigen::MatrixXd& p, const Eigen::MatrixXd& q,
                        const DomainBox& box) {
  if (p.rows() != q.rows() || p.cols() != q.cols()) {
    throw std::invalid_argument("kl_between_grids: grid shape mismatch");
  }
  if ((p.array() < 0.0).any() || (q.array() < 0.0).any()) {
    throw std::invalid_argument("kl_between_grids: negative density");
  }
  const double cell = box.area() / (static_cast<double>(p.rows()) * p.cols());
  double kl = 0.0;
  for (Eigen::Index b = 0; b < p.rows(); ++b) {
    for (Eigen::Index a = 0; a < p.cols(); ++a) {
      const double pv = p(b, a);
      if (pv <= kCellPFloor) continue;
      kl += cell * pv * std::log(pv / std::max(q(b, a), kQFloor));
    }
  }
  return kl;
}

double bound_proposition1(double r_phi, double g_inf, std::int64_t n) {
  if (r_phi < 0.0 || g_inf < 0.0 || n < 1) {
    throw std::invalid_argument("bound_proposition1: invalid arguments");
  }
  return r_phi * g_inf / std::sqrt(static_cast<double>(n));
}

double bound_theorem1(double a0, double g_inf, double nu, std::int64_t n) {
  if (a0 < 0.0 || !(g_inf > 0.0) || !(nu > 0.0) || n < 0) {
    throw std::invalid_argument("bound_theorem1: invalid arguments");
  }
  return std::max(2.0 * a0, 8.0 * g_inf * g_inf / (nu * nu)) /
         static_cast<double>(n + 1);
}

double bound_theorem2(double kl0, double g_inf, double nu, std::int64_t n) {
  if (kl0 < 0.0 || !(g_inf > 0.0) || !(nu > 0.0) || n < 0) {
    throw std::invalid_argument("bound_theorem2: invalid arguments");
  }
  return std::max(kl0, 2.0 * g_inf * g_inf / (nu * nu)) / static_cast<double>(n + 1);
}

RateFit fit_rate(std::span<const std::pair<double, double>> n_and_metric) {
  std::vector<std::pair<double, double>> pts;
  for (const auto& [n, v] : n_and_metric) {
    if (!(n > 0.0) || !(v > 0.0) || !std::isfinite(v)) continue;
    pts.emplace_back(std::log(n), std::log(v));
  }
  if (pts.size() < 5) {
    throw std::invalid_argument("fit_rate: need at least 5 positive points, have " +
                                std::to_string(pts.size()));
  }
  const double n = static_cast<double>(pts.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (const auto& [x, y] : pts) {
    sx += x;
    sy += y;
    sxx += x * x;
    sxy += x * y;
  }
  const double denom = n * sxx - sx * sx;
  if (std::abs(denom) < 1e-12) {
    throw std::invalid_argument("fit_rate: degenerate abscissae");
  }
  RateFit fit;
  fit.slope = (n * sxy - sx * sy) / denom;
  fit.intercept = (sy - fit.slope * sx) / n;
  double ss_res = 0.0, ss_tot = 0.0;
  const double mean_y = sy / n;
  for (const auto& [x, y] : pts) {
    const double pred = fit.intercept + fit.slope * x;
    ss_res += (y - pred) * (y - pred);
    ss_tot += (y - mean_y) * (y - mean_y);
  }
  fit.r_squared = ss_tot <= 1e-30 ? 1.0 : 1.0 - ss_res / ss_tot;
  fit.points_used = static_cast<int>(pts.size());
  return fit;
}

}  // namespace mixest
