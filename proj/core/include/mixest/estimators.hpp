#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "mixest/dictionary.hpp"
#include "mixest/simplex.hpp"

namespace mixest {

enum class ScheduleKind { ConstantSqrtN, StronglyConvex, PowerDecay };

/// Step-size schedule γ_i, indexed by the 0-based step count i:
///   ConstantSqrtN  γ = r_phi/(g_inf·√N)        (Prop. 1, horizon-tuned)
///   StronglyConvex γ_i = 2/(ν·(i+1))           (Thms. 1–2)
///   PowerDecay     γ_i = γ₀/(1+i)^decay        (§V experiments)
class StepSchedule {
 public:
  static StepSchedule constant_sqrt_n(std::int64_t horizon, double r_phi,
                                      double g_inf);
  static StepSchedule strongly_convex(double nu);
  static StepSchedule power_decay(double gamma0, double decay);

  double gamma(std::int64_t step) const;

  ScheduleKind kind() const { return kind_; }
  double nu() const { return nu_; }
  double gamma0() const { return gamma0_; }
  double decay() const { return decay_; }
  std::int64_t horizon() const { return horizon_; }

 private:
  StepSchedule() = default;
  ScheduleKind kind_ = ScheduleKind::PowerDecay;
  double constant_ = 0.0;
  double nu_ = 0.0;
  double gamma0_ = 0.0;
  double decay_ = 0.0;
  std::int64_t horizon_ = 0;
};

/// Which iterate an estimator reports: the last iterate m^{N+1} (Thms. 1–2)
/// or the Cesàro running mean m̃ (Algorithm 1).
enum class OutputMode { LastIterate, Cesaro };

/// Update direction convention. The loss gradient is −g (g the score
/// vector), so Descent moves along +g; Literal reproduces Algorithm 2's
/// printed "m − γg" form for auditability.
enum class SignConvention { Descent, Literal };

/// Projected (sub)gradient step on the simplex: Π_Δ(m + γg) under Descent,
/// Π_Δ(m − γg) under Literal.
WeightVector sgd_step(const WeightVector& m, const Eigen::VectorXd& g,
                      double gamma,
                      SignConvention sign = SignConvention::Descent);

/// Multiplicative-weights step m'_j ∝ m_j·exp(±γ g_j), computed with
/// max-subtraction so the exponentials cannot overflow. Input and output are
/// floored at 1e-12 (entropy geometry never leaves the open simplex).
WeightVector exp_smd_step(const WeightVector& m, const Eigen::VectorXd& g,
                          double gamma,
                          SignConvention sign = SignConvention::Descent);

/// Online estimator state: current iterate, Cesàro running mean, and the
/// 0-based count of completed steps.
struct EstimatorState {
  MirrorMap mirror;
  StepSchedule schedule;
  SignConvention sign;
  WeightVector current;
  WeightVector cesaro;
  std::int64_t step_count = 0;

  static EstimatorState init(MirrorKind mirror, StepSchedule schedule,
                             WeightVector m0,
                             SignConvention sign = SignConvention::Descent);
};

/// One mirror-descent step on one sample: evaluates the dictionary once,
/// dispatches on the mirror kind (Euclidean → sgd_step, NegativeEntropy →
/// exp_smd_step), then folds the new iterate into the Cesàro mean
/// m̃^i = m^i/i + ((i−1)/i)·m̃^{i−1}.
EstimatorState smd_step(EstimatorState state, const Dictionary& dict,
                        const SamplePoint& zeta);

/// Runs smd_step over the stream, snapshotting the requested output at each
/// checkpoint (checkpoint value = number of completed steps, ascending).
/// Throws ConfigError if the stream is shorter than the last checkpoint.
std::vector<WeightVector> run_estimator(const Dictionary& dict, MirrorKind mirror,
                                        const StepSchedule& schedule,
                                        const WeightVector& m0,
                                        std::span<const SamplePoint> stream,
                                        std::span<const std::int64_t> checkpoints,
                                        OutputMode mode,
                                        SignConvention sign = SignConvention::Descent);

/// Softmax-parameterized SGD baseline (§V Method 2): unconstrained logits w,
/// m = softmax(w), updated by the chain-rule gradient ∂loss/∂w_j = m_j(1−g_j).
/// Cesàro mode averages the softmax iterates in probability space.
std::vector<WeightVector> run_softmax_sgd(const Dictionary& dict,
                                          const StepSchedule& schedule,
                                          const Eigen::VectorXd& w0,
                                          std::span<const SamplePoint> stream,
                                          std::span<const std::int64_t> checkpoints,
                                          OutputMode mode = OutputMode::LastIterate);

/// One softmax-SGD logit update (exposed for gradient tests).
Eigen::VectorXd softmax_sgd_step(const Eigen::VectorXd& w, const Eigen::VectorXd& g,
                                 double gamma);

/// Max-subtracted softmax.
WeightVector softmax(const Eigen::VectorXd& w);

}  // namespace mixest
