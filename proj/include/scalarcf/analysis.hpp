#pragma once

#include <Eigen/Core>
#include <deque>
#include <limits>
#include <optional>

#include "scalarcf/measurement.hpp"
#include "scalarcf/so3.hpp"

namespace scalarcf {

struct ErrorMetrics {
  double theta_tilde = 0.0;  ///< rad, in [0, π]
  double V = 0.0;            ///< tr(I − R̃)
  double trace_r_tilde = 3.0;
};

/// R̃ = R̂Rᵀ summarized by its angle, the potential V and its trace.
ErrorMetrics error_metrics(const Rotation& r, const Rotation& r_hat);

/// Right-invariant attitude error R̂Rᵀ.
inline Rotation attitude_error(const Rotation& r, const Rotation& r_hat) {
  return r_hat * r.transpose();
}

/// Sliding-window persistence-of-excitation metric.
///
/// Accumulates (1/δ)∫ V(s)V(s)ᵀ ds over the trailing window with the
/// trapezoidal rule at the sample times and reports its second-smallest
/// eigenvalue. Until the window has filled, the average is taken over the
/// span actually covered; a single sample reports λ₂(VVᵀ).
class PEWindow {
 public:
  explicit PEWindow(double delta);

  /// Times must be non-decreasing; throws std::invalid_argument otherwise.
  void update(double t, const Eigen::Ref<const Eigen::Matrix<double, 3, Eigen::Dynamic>>& v);

  double delta() const { return delta_; }
  double mu_hat() const { return mu_hat_; }
  /// Time covered by the retained samples.
  double span() const;
  std::size_t sample_count() const { return samples_.size(); }
  /// Current window average of VVᵀ.
  Mat3 averaged_gram() const;

 private:
  struct Sample {
    double t;
    Mat3 gram;
  };

  void refresh_integral();

  double delta_;
  std::deque<Sample> samples_;
  Mat3 integral_ = Mat3::Zero();
  std::size_t updates_since_refresh_ = 0;
  double mu_hat_ = 0.0;
};

/// λ₂ (second smallest eigenvalue) of a symmetric 3×3 matrix.
double second_eigenvalue(const Mat3& m);

/// ‖sin∠(a, Rᵀb̄)‖ with b̄ = b₁×b₂/‖b₁×b₂‖. Throws CollinearReferences if
/// ‖b₁×b₂‖ ≤ 1e-9 or a = 0.
double epsilon_lemma1(const Vec3& a, const Rotation& r, const Vec3& b1, const Vec3& b2);

/// ‖sin∠(ā, Rᵀb₁)‖ with ā = a₁×a₂/‖a₁×a₂‖. Throws CollinearReferences if
/// ‖a₁×a₂‖ ≤ 1e-9 or b₁ = 0.
double epsilon_lemma2(const Vec3& a1, const Vec3& a2, const Rotation& r, const Vec3& b1);

/// cos(θ/2)cos(θ) − ε; positive margin certifies the basin of angle θ.
double theta_star_margin(double theta_star, double epsilon);

/// Largest θ* ∈ (0, π/2] with cos(θ*/2)cos(θ*) ≥ ε, by bisection to 1e-10 rad.
/// Returns π/2 for ε = 0; throws NoSolution unless 0 ≤ ε < 1.
double solve_theta_star(double epsilon);

/// tr(R̃) ≥ 1 + 2cos θ*, boundary inclusive (1e-12 slack for round-off).
bool basin_check(const ErrorMetrics& metrics, double theta_star);

struct BasinCertificate {
  double theta_star = 0.0;
  double epsilon = 0.0;
  double margin = 0.0;
  bool inside_basin = false;

  bool valid() const { return margin > 0.0; }
};

/// Evaluates the basin certificate for the current error. epsilon is the
/// instantaneous ε-condition value; theta_star is the run's certified angle.
BasinCertificate certify(const ErrorMetrics& metrics, double theta_star, double epsilon);

struct CertificateBound {
  double theta_star;
  double epsilon;
};

struct LyapunovDecomposition {
  double V_dot_numeric = std::numeric_limits<double>::quiet_NaN();
  double V0 = 0.0;
  double V_E = 0.0;
  double E_norm = 0.0;
  /// Upper bound on V̇ valid inside the basin; NaN without a certificate.
  double bound_rhs = std::numeric_limits<double>::quiet_NaN();
};

/// Two inertial vectors measured along one body direction a:
/// V̇ = V₀ + V_E with E = Râ âᵀRᵀ − b̄b̄ᵀ.
/// Throws ConfigurationMismatch for collinear references or a = 0.
LyapunovDecomposition lyapunov_decompose_lemma1(const Vec3& a, const Rotation& r,
                                                const Rotation& r_hat, const Vec3& b1,
                                                const Vec3& b2, double k,
                                                std::optional<CertificateBound> bound = {});

/// One inertial vector measured along two body directions a₁, a₂:
/// V̇ = V₀ + V_E with E = b̂₁b̂₁ᵀ − Rā āᵀRᵀ.
LyapunovDecomposition lyapunov_decompose_lemma2(const Vec3& a1, const Vec3& a2,
                                                const Rotation& r, const Rotation& r_hat,
                                                const Vec3& b1, double k,
                                                std::optional<CertificateBound> bound = {});

/// Matrices of the ≥3-scalar argument: P = RΛΛ†Rᵀ and P̂ = R̃PR̃ᵀ.
struct ProjectorDiagnostic {
  Mat3 P = Mat3::Zero();
  Mat3 P_hat = Mat3::Zero();
  /// tr(P − PR̃²), the predicted −V̇/k.
  double predicted_rate = 0.0;
};

ProjectorDiagnostic theorem1_diagnostic(const DirectionMatrix& lambda, const Rotation& r,
                                        const Rotation& r_hat);

/// −k·tr(M − MR̃²): V̇ for innovations whose [Δ]× reduces to k(MR̃ᵀ − R̃M).
double projector_rate(const Mat3& m, const Rotation& r_tilde, double k);

/// Closed-form V̇ = −tr([Δ]× R̃).
double lyapunov_rate(const Vec3& delta, const Rotation& r_tilde);

}  // namespace scalarcf
