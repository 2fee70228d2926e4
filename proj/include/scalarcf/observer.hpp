#pragma once

#include <optional>
#include <vector>

#include "scalarcf/measurement.hpp"
#include "scalarcf/so3.hpp"

namespace scalarcf {

struct ObserverState {
  Rotation r_hat;
  double k = 1.0;

  ObserverState() = default;
  /// Throws std::invalid_argument unless k > 0.
  ObserverState(const Rotation& r_hat, double k);
};

struct InnovationReport {
  Vec3 delta = Vec3::Zero();
  /// Per-channel terms k·[S†b_i]× R̂ (Λ_iᵀ)† ỹ_i; they sum to delta.
  std::vector<Vec3> contributions;
};

/// Generalized innovation Δ = k Σ [S†b_i]× R̂ (Λ_iᵀ)† ỹ_i for scalar outputs.
InnovationReport innovation(const SensorBank& bank, const ObserverState& state,
                            const Measurement& y, double rel_tol = kDefaultPinvTolerance);

/// Cross-product innovation of the full-vector complementary filter,
/// Δ = k R̂ Σ [Rᵀb_i]× R̂ᵀb_i with Rᵀb_i taken from y. Throws NotVectorBank
/// unless every channel has Λ_i = I₃.
Vec3 classical_innovation(const SensorBank& bank, const ObserverState& state,
                          const Measurement& y);

/// Same result as innovation(), reusing pseudoinverses while the bank's
/// directions and references are unchanged between calls.
class InnovationWorkspace {
 public:
  explicit InnovationWorkspace(double rel_tol = kDefaultPinvTolerance) : rel_tol_(rel_tol) {}

  Vec3 delta(const SensorBank& bank, const ObserverState& state, const Measurement& y);

 private:
  double rel_tol_;
  std::vector<DirectionMatrix> lambdas_;
  std::vector<LambdaPinv> lambda_pinvs_;
  std::vector<Vec3> refs_;
  Mat3 s_pinv_ = Mat3::Zero();
};

/// One classical RK4 step of Ẋ = f(t, X) on 3×3 matrices followed by
/// projection onto SO(3).
template <typename Rhs>
Rotation rk4_step(const Rotation& x, double t, double dt, Rhs&& f) {
  const Mat3& x0 = x.matrix();
  const Mat3 k1 = f(t, x0);
  const Mat3 k2 = f(t + 0.5 * dt, Mat3(x0 + 0.5 * dt * k1));
  const Mat3 k3 = f(t + 0.5 * dt, Mat3(x0 + 0.5 * dt * k2));
  const Mat3 k4 = f(t + dt, Mat3(x0 + dt * k3));
  return project_to_so3(x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4));
}

/// Ṙ̂ = R̂[Ω]× + [Δ]×R̂ with Ω and Δ held over the step. Throws
/// std::invalid_argument unless dt > 0.
ObserverState observer_step(const ObserverState& state, const Vec3& omega, const Vec3& delta,
                            double dt);

/// Ṙ = R[Ω]× with Ω held over the step.
Rotation truth_step(const Rotation& r, const Vec3& omega, double dt);

}  // namespace scalarcf
