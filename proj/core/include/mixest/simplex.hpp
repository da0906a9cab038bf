#pragma once

#include <Eigen/Core>

#include "mixest/common.hpp"

namespace mixest {

/// A point on the probability simplex Δ_M. Construction validates
/// nonnegativity and renormalizes to unit sum, so every live instance
/// satisfies the simplex invariants (entries ≥ 0, Σ = 1 up to fp rounding,
/// M ≥ 2).
class WeightVector {
 public:
  explicit WeightVector(Eigen::VectorXd w);

  static WeightVector uniform(Eigen::Index m);
  static WeightVector vertex(Eigen::Index m, Eigen::Index j);

  /// Adopts `w` without validation or renormalization. Caller guarantees the
  /// simplex invariants already hold (entries ≥ 0, |Σ − 1| ≤ 1e-9). Used on
  /// hot update paths and where exact bit-preservation matters (projection
  /// idempotence).
  static WeightVector from_normalized(Eigen::VectorXd w);

  const Eigen::VectorXd& vec() const { return w_; }
  double operator[](Eigen::Index i) const { return w_(i); }
  Eigen::Index size() const { return w_.size(); }

  /// Clamp entries below `floor` up, renormalize, then clamp once more
  /// without renormalizing. The final clamp guarantees min ≥ floor exactly
  /// while perturbing the sum by at most M·floor·eps.
  WeightVector floored(double floor = kWeightFloor) const;

 private:
  struct Unchecked {};
  WeightVector(Eigen::VectorXd w, Unchecked) : w_(std::move(w)) {}
  Eigen::VectorXd w_;
};

/// Euclidean projection onto Δ_M by sort-then-threshold (Duchi et al. 2008),
/// O(M log M). Exact minimizer of ‖z − v‖₂ over the simplex.
WeightVector project_simplex(const Eigen::VectorXd& v);

/// Σ p_i log(p_i/q_i) with 0·log 0 = 0. Returns +inf (a value, not an
/// exception) when q_i = 0 < p_i, so metric streams stay total.
double kl_divergence(const WeightVector& p, const WeightVector& q);

enum class MirrorKind { Euclidean, NegativeEntropy };

/// Distance-generating function φ with its Bregman divergence and the R_φ
/// simplex diameter of Eq. (5). Euclidean: φ = ½‖·‖²; NegativeEntropy:
/// φ = Σ x log x.
class MirrorMap {
 public:
  explicit MirrorMap(MirrorKind kind) : kind_(kind) {}

  MirrorKind kind() const { return kind_; }

  double phi(const WeightVector& x) const;

  /// Throws std::domain_error for NegativeEntropy at boundary points
  /// (log undefined at 0).
  Eigen::VectorXd grad_phi(const WeightVector& x) const;

  /// D_φ(x, y) = φ(x) − φ(y) − ⟨∇φ(y), x−y⟩. Closed forms: ½‖x−y‖² for
  /// Euclidean, kl_divergence(x, y) for NegativeEntropy (may be +inf when
  /// y has zeros where x does not).
  double bregman(const WeightVector& x, const WeightVector& y) const;

  /// R_φ(Δ_M) = sqrt(max φ − min φ) over the simplex:
  /// NegativeEntropy → sqrt(log M); Euclidean → sqrt((M−1)/(2M)).
  double r_phi(Eigen::Index m) const;

 private:
  MirrorKind kind_;
};

}  // namespace mixest
