#include "mixest/estimators.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace mixest {

StepSchedule StepSchedule::constant_sqrt_n(std::int64_t horizon, double r_phi,
                                           double g_inf) {
  if (horizon < 1) {
    throw ConfigError("constant_sqrt_n schedule: horizon must be >= 1");
  }
  if (!(r_phi > 0.0) || !std::isfinite(r_phi)) {
    throw ConfigError("constant_sqrt_n schedule: r_phi must be positive");
  }
  if (!(g_inf > 0.0) || !std::isfinite(g_inf)) {
    throw ConfigError("constant_sqrt_n schedule: g_inf must be positive and finite");
  }
  StepSchedule s;
  s.kind_ = ScheduleKind::ConstantSqrtN;
  s.horizon_ = horizon;
  s.constant_ = r_phi / (g_inf * std::sqrt(static_cast<double>(horizon)));
  return s;
}

StepSchedule StepSchedule::strongly_convex(double nu) {
  if (!(nu > 0.0) || !std::isfinite(nu)) {
    throw ConfigError("strongly_convex schedule: nu must be positive, got " +
                      std::to_string(nu));
  }
  StepSchedule s;
  s.kind_ = ScheduleKind::StronglyConvex;
  s.nu_ = nu;
  return s;
}

StepSchedule StepSchedule::power_decay(double gamma0, double decay) {
  if (!(gamma0 > 0.0) || !std::isfinite(gamma0)) {
    throw ConfigError("power_decay schedule: gamma0 must be positive");
  }
  if (decay < 0.0 || decay > 1.0 || !std::isfinite(decay)) {
    throw ConfigError("power_decay schedule: decay must lie in [0, 1]");
  }
  StepSchedule s;
  s.kind_ = ScheduleKind::PowerDecay;
  s.gamma0_ = gamma0;
  s.decay_ = decay;
  return s;
}

double StepSchedule::gamma(std::int64_t step) const {
  switch (kind_) {
    case ScheduleKind::ConstantSqrtN:
      return constant_;
    case ScheduleKind::StronglyConvex:
      return 2.0 / (nu_ * static_cast<double>(step + 1));
    case ScheduleKind::PowerDecay:
      return gamma0_ / std::pow(1.0 + static_cast<double>(step), decay_);
  }
  return 0.0;
}

WeightVector sgd_step(const WeightVector& m, const Eigen::VectorXd& g,
                      double gamma, SignConvention sign) {
  const double s = sign == SignConvention::Descent ? gamma : -gamma;
  return project_simplex(m.vec() + s * g);
}

WeightVector exp_smd_step(const WeightVector& m, const Eigen::VectorXd& g,
                          double gamma, SignConvention sign) {
  if (g.size() != m.size()) {
    throw std::invalid_argument("exp_smd_step: gradient length mismatch");
  }
  const double s = sign == SignConvention::Descent ? gamma : -gamma;
  Eigen::ArrayXd logits = s * g.array();
  logits -= logits.maxCoeff();
  Eigen::VectorXd w =
      (m.floored().vec().array() * logits.exp()).matrix();
  w /= w.sum();
  return WeightVector::from_normalized(std::move(w)).floored();
}

EstimatorState EstimatorState::init(MirrorKind mirror, StepSchedule schedule,
                                    WeightVector m0, SignConvention sign) {
  WeightVector start =
      mirror == MirrorKind::NegativeEntropy ? m0.floored() : m0;
  return EstimatorState{MirrorMap(mirror), std::move(schedule), sign, start,
                        start, 0};
}

EstimatorState smd_step(EstimatorState state, const Dictionary& dict,
                        const SamplePoint& zeta) {
  const Eigen::VectorXd g = dict.stochastic_gradient(state.current, zeta);
  const double gamma = state.schedule.gamma(state.step_count);
  state.current = state.mirror.kind() == MirrorKind::Euclidean
                      ? sgd_step(state.current, g, gamma, state.sign)
                      : exp_smd_step(state.current, g, gamma, state.sign);
  state.step_count += 1;
  const double i = static_cast<double>(state.step_count);
  if (state.step_count == 1) {
    state.cesaro = state.current;
  } else {
    state.cesaro = WeightVector::from_normalized(
        state.current.vec() / i + ((i - 1.0) / i) * state.cesaro.vec());
  }
  return state;
}

namespace {

void check_checkpoints(std::span<const std::int64_t> checkpoints,
                       std::size_t stream_size) {
  std::int64_t prev = 0;
  for (const std::int64_t c : checkpoints) {
    if (c < 1) throw ConfigError("checkpoints must be >= 1");
    if (c < prev) throw ConfigError("checkpoints must be ascending");
    prev = c;
  }
  if (!checkpoints.empty() &&
      static_cast<std::size_t>(checkpoints.back()) > stream_size) {
    throw ConfigError("stream of length " + std::to_string(stream_size) +
                      " exhausted before checkpoint " +
                      std::to_string(checkpoints.back()));
  }
}

}  // namespace

std::vector<WeightVector> run_estimator(const Dictionary& dict, MirrorKind mirror,
                                        const StepSchedule& schedule,
                                        const WeightVector& m0,
                                        std::span<const SamplePoint> stream,
                                        std::span<const std::int64_t> checkpoints,
                                        OutputMode mode, SignConvention sign) {
  check_checkpoints(checkpoints, stream.size());
  std::vector<WeightVector> snapshots;
  snapshots.reserve(checkpoints.size());
  if (checkpoints.empty()) return snapshots;

  EstimatorState state = EstimatorState::init(mirror, schedule, m0, sign);
  std::size_t next = 0;
  for (const SamplePoint& zeta : stream) {
    state = smd_step(std::move(state), dict, zeta);
    while (next < checkpoints.size() && checkpoints[next] == state.step_count) {
      snapshots.push_back(mode == OutputMode::Cesaro ? state.cesaro
                                                     : state.current);
      ++next;
    }
    if (next == checkpoints.size()) break;
  }
  return snapshots;
}

WeightVector softmax(const Eigen::VectorXd& w) {
  Eigen::ArrayXd e = (w.array() - w.maxCoeff()).exp();
  return WeightVector::from_normalized((e / e.sum()).matrix());
}

Eigen::VectorXd softmax_sgd_step(const Eigen::VectorXd& w, const Eigen::VectorXd& g,
                                 double gamma) {
  const WeightVector m = softmax(w);
  // ∂loss/∂w_j = m_j(1 − g_j); descend.
  return w - gamma * (m.vec().array() * (1.0 - g.array())).matrix();
}

std::vector<WeightVector> run_softmax_sgd(const Dictionary& dict,
                                          const StepSchedule& schedule,
                                          const Eigen::VectorXd& w0,
                                          std::span<const SamplePoint> stream,
                                          std::span<const std::int64_t> checkpoints,
                                          OutputMode mode) {
  check_checkpoints(checkpoints, stream.size());
  std::vector<WeightVector> snapshots;
  snapshots.reserve(checkpoints.size());
  if (checkpoints.empty()) return snapshots;

  Eigen::VectorXd w = w0;
  WeightVector m = softmax(w);
  WeightVector cesaro = m;
  std::int64_t steps = 0;
  std::size_t next = 0;
  for (const SamplePoint& zeta : stream) {
    const Eigen::VectorXd g = dict.stochastic_gradient(m, zeta);
    w = softmax_sgd_step(w, g, schedule.gamma(steps));
    m = softmax(w);
    steps += 1;
    const double i = static_cast<double>(steps);
    cesaro = steps == 1 ? m
                        : WeightVector::from_normalized(
                              m.vec() / i + ((i - 1.0) / i) * cesaro.vec());
    while (next < checkpoints.size() && checkpoints[next] == steps) {
      snapshots.push_back(mode == OutputMode::Cesaro ? cesaro : m);
      ++next;
    }
    if (next == checkpoints.size()) break;
  }
  return snapshots;
}

}  // namespace mixest
