#include "mixest/dictionary.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

namespace mixest {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kMixtureFloor = 1e-300;

// Mass of N(mu, sigma²) on [lo, hi] via the Gaussian CDF.
double gaussian_mass_1d(double mu, double sigma, double lo, double hi) {
  const double inv = 1.0 / (sigma * std::sqrt(2.0));
  return 0.5 * (std::erf((hi - mu) * inv) - std::erf((lo - mu) * inv));
}

}  // namespace

Eigen::VectorXd midpoint_grid(double lo, double hi, int cells) {
  if (cells < 1) throw std::invalid_argument("midpoint_grid: cells < 1");
  Eigen::VectorXd xs(cells);
  const double h = (hi - lo) / cells;
  for (int i = 0; i < cells; ++i) xs(i) = lo + (i + 0.5) * h;
  return xs;
}

Dictionary Dictionary::multiscale_gaussian(const DomainBox& box,
                                           const std::vector<GridLayer>& layers) {
  if (layers.empty()) {
    throw ConfigError("multiscale_gaussian: at least one layer required");
  }
  if (!(box.width() > 0.0) || !(box.height() > 0.0)) {
    throw ConfigError("multiscale_gaussian: degenerate domain box");
  }
  Eigen::Index m = 0;
  for (const auto& layer : layers) {
    if (layer.grid_side < 1) {
      throw ConfigError("multiscale_gaussian: grid_side must be >= 1");
    }
    if (!(layer.sigma > 0.0)) {
      throw ConfigError("multiscale_gaussian: sigma must be positive");
    }
    m += static_cast<Eigen::Index>(layer.grid_side) * layer.grid_side;
  }
  if (m < 2) {
    throw ConfigError("multiscale_gaussian: dictionary needs M >= 2 components, got " +
                      std::to_string(m));
  }

  Dictionary d;
  d.kind_ = DictionaryKind::GaussianGrid;
  d.box_ = box;
  d.m_ = m;
  d.mu_x_.resize(m);
  d.mu_y_.resize(m);
  d.sigma_.resize(m);
  d.amplitude_.resize(m);
  d.inv_two_sigma2_.resize(m);
  d.edge_truncated_.assign(static_cast<std::size_t>(m), false);

  Eigen::Index idx = 0;
  for (const auto& layer : layers) {
    const int side = layer.grid_side;
    const double sigma = layer.sigma;
    for (int iy = 0; iy < side; ++iy) {
      for (int ix = 0; ix < side; ++ix) {
        const double fx = side == 1 ? 0.5 : static_cast<double>(ix) / (side - 1);
        const double fy = side == 1 ? 0.5 : static_cast<double>(iy) / (side - 1);
        const double cx = box.xmin + fx * box.width();
        const double cy = box.ymin + fy * box.height();
        d.mu_x_(idx) = cx;
        d.mu_y_(idx) = cy;
        d.sigma_(idx) = sigma;
        d.amplitude_(idx) = 1.0 / (kTwoPi * sigma * sigma);
        d.inv_two_sigma2_(idx) = 1.0 / (2.0 * sigma * sigma);

        const bool interior = cx - 4.0 * sigma >= box.xmin && cx + 4.0 * sigma <= box.xmax &&
                              cy - 4.0 * sigma >= box.ymin && cy + 4.0 * sigma <= box.ymax;
        d.edge_truncated_[static_cast<std::size_t>(idx)] = !interior;
        if (interior) {
          const double mass = gaussian_mass_1d(cx, sigma, box.xmin, box.xmax) *
                              gaussian_mass_1d(cy, sigma, box.ymin, box.ymax);
          if (std::abs(mass - 1.0) > 1e-3) {
            throw std::runtime_error(
                "multiscale_gaussian: component " + std::to_string(idx) +
                " integrates to " + std::to_string(mass) + " over the box");
          }
        }
        ++idx;
      }
    }
  }
  return d;
}

Dictionary Dictionary::categorical(std::int64_t num_symbols, double epsilon) {
  if (num_symbols < 2) {
    throw ConfigError("categorical dictionary: need K >= 2, got " +
                      std::to_string(num_symbols));
  }
  if (!(epsilon > 0.0) || !(epsilon < 1.0)) {
    throw ConfigError("categorical dictionary: epsilon must lie in (0,1), got " +
                      std::to_string(epsilon));
  }
  Dictionary d;
  d.kind_ = DictionaryKind::Categorical;
  d.m_ = static_cast<Eigen::Index>(num_symbols);
  d.num_symbols_ = num_symbols;
  d.epsilon_ = epsilon;
  return d;
}

const DomainBox& Dictionary::domain() const {
  if (is_categorical()) {
    throw std::logic_error("domain(): categorical dictionary has no box");
  }
  return box_;
}

std::int64_t Dictionary::alphabet_size() const {
  if (!is_categorical()) {
    throw std::logic_error("alphabet_size(): not a categorical dictionary");
  }
  return num_symbols_;
}

double Dictionary::epsilon() const {
  if (!is_categorical()) {
    throw std::logic_error("epsilon(): not a categorical dictionary");
  }
  return epsilon_;
}

const Eigen::VectorXd& Dictionary::centers_x() const { return mu_x_; }
const Eigen::VectorXd& Dictionary::centers_y() const { return mu_y_; }
const Eigen::VectorXd& Dictionary::sigmas() const { return sigma_; }
const std::vector<bool>& Dictionary::edge_truncated() const { return edge_truncated_; }

Eigen::VectorXd Dictionary::component_values(const SamplePoint& zeta) const {
  if (is_categorical()) {
    if (!zeta.is_categorical()) {
      throw std::invalid_argument(
          "component_values: continuous point given to a categorical dictionary");
    }
    if (zeta.symbol >= num_symbols_) {
      throw std::invalid_argument("component_values: symbol " +
                                  std::to_string(zeta.symbol) +
                                  " out of range for K = " +
                                  std::to_string(num_symbols_));
    }
    Eigen::VectorXd f =
        Eigen::VectorXd::Constant(m_, epsilon_ / static_cast<double>(num_symbols_));
    f(static_cast<Eigen::Index>(zeta.symbol)) += 1.0 - epsilon_;
    return f;
  }
  if (zeta.is_categorical()) {
    throw std::invalid_argument(
        "component_values: symbol given to a Gaussian-grid dictionary");
  }
  if (!box_.contains(zeta.x, zeta.y)) {
    throw std::invalid_argument("component_values: point (" + std::to_string(zeta.x) +
                                ", " + std::to_string(zeta.y) +
                                ") outside the domain box");
  }
  Eigen::VectorXd f(m_);
  for (Eigen::Index i = 0; i < m_; ++i) {
    const double dx = zeta.x - mu_x_(i);
    const double dy = zeta.y - mu_y_(i);
    const double e = (dx * dx + dy * dy) * inv_two_sigma2_(i);
    f(i) = e > 708.0 ? 0.0 : amplitude_(i) * std::exp(-e);
  }
  return f;
}

DensityEvaluation Dictionary::evaluate(const WeightVector& m,
                                       const SamplePoint& zeta) const {
  if (m.size() != m_) {
    throw std::invalid_argument("evaluate: weight vector has length " +
                                std::to_string(m.size()) + ", dictionary has M = " +
                                std::to_string(m_));
  }
  DensityEvaluation out;
  out.values = component_values(zeta);
  out.mixture = std::max(m.vec().dot(out.values), kMixtureFloor);
  return out;
}

Eigen::VectorXd Dictionary::stochastic_gradient(const WeightVector& m,
                                                const SamplePoint& zeta) const {
  const DensityEvaluation eval = evaluate(m, zeta);
  Eigen::VectorXd g = eval.values / eval.mixture;
  if (!g.allFinite()) {
    throw std::runtime_error(
        "stochastic_gradient: mixture density underflow (Q = " +
        std::to_string(eval.mixture) + ") produced a non-finite score");
  }
  return g;
}

GInfEstimate Dictionary::g_infinity(int grid_side) const {
  GInfEstimate est;
  if (is_categorical()) {
    const double k = static_cast<double>(num_symbols_);
    est.value = (k * (1.0 - epsilon_) + epsilon_) / epsilon_;
    est.log_value = std::log(est.value);
    est.grid_side = 0;
    return est;
  }
  if (grid_side < 1) throw std::invalid_argument("g_infinity: grid_side < 1");
  const Eigen::VectorXd xs = midpoint_grid(box_.xmin, box_.xmax, grid_side);
  const Eigen::VectorXd ys = midpoint_grid(box_.ymin, box_.ymax, grid_side);
  double worst = 0.0;  // log of the worst component ratio seen
  for (int b = 0; b < grid_side; ++b) {
    for (int a = 0; a < grid_side; ++a) {
      double lo = std::numeric_limits<double>::infinity();
      double hi = -std::numeric_limits<double>::infinity();
      for (Eigen::Index i = 0; i < m_; ++i) {
        const double dx = xs(a) - mu_x_(i);
        const double dy = ys(b) - mu_y_(i);
        const double logf =
            std::log(amplitude_(i)) - (dx * dx + dy * dy) * inv_two_sigma2_(i);
        lo = std::min(lo, logf);
        hi = std::max(hi, logf);
      }
      worst = std::max(worst, hi - lo);
    }
  }
  est.log_value = worst;
  est.value = worst > 709.0 ? std::numeric_limits<double>::infinity()
                            : std::exp(worst);
  est.grid_side = grid_side;
  return est;
}

Eigen::MatrixXd Dictionary::axis_profile(const Eigen::VectorXd& coords,
                                         int axis) const {
  if (is_categorical()) {
    throw std::logic_error("axis_profile: categorical dictionary");
  }
  const Eigen::VectorXd& mu = axis == 0 ? mu_x_ : mu_y_;
  Eigen::MatrixXd profile(m_, coords.size());
  for (Eigen::Index i = 0; i < m_; ++i) {
    const double amp = std::sqrt(amplitude_(i));
    const double inv = inv_two_sigma2_(i);
    for (Eigen::Index t = 0; t < coords.size(); ++t) {
      const double d = coords(t) - mu(i);
      const double e = d * d * inv;
      profile(i, t) = e > 708.0 ? 0.0 : amp * std::exp(-e);
    }
  }
  return profile;
}

Eigen::MatrixXd Dictionary::mixture_grid(const WeightVector& m, int grid_side) const {
  if (m.size() != m_) {
    throw std::invalid_argument("mixture_grid: weight length mismatch");
  }
  const Eigen::VectorXd xs = midpoint_grid(box_.xmin, box_.xmax, grid_side);
  const Eigen::VectorXd ys = midpoint_grid(box_.ymin, box_.ymax, grid_side);
  const Eigen::MatrixXd px = axis_profile(xs, 0);  // M x nx
  const Eigen::MatrixXd py = axis_profile(ys, 1);  // M x ny
  // Q(b, a) = Σ_i m_i py(i,b) px(i,a): one GEMM after scaling rows by m.
  return (py.array().colwise() * m.vec().array()).matrix().transpose() * px;
}

Eigen::VectorXd Dictionary::mixture_pmf(const WeightVector& m) const {
  if (!is_categorical()) {
    throw std::logic_error("mixture_pmf: not a categorical dictionary");
  }
  if (m.size() != m_) {
    throw std::invalid_argument("mixture_pmf: weight length mismatch");
  }
  return ((1.0 - epsilon_) * m.vec().array() +
          epsilon_ / static_cast<double>(num_symbols_))
      .matrix();
}

}  // namespace mixest
