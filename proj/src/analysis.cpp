#include "scalarcf/analysis.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "scalarcf/errors.hpp"

namespace scalarcf {

ErrorMetrics error_metrics(const Rotation& r, const Rotation& r_hat) {
  const Rotation rt = attitude_error(r, r_hat);
  ErrorMetrics m;
  m.theta_tilde = log_so3(rt).angle;
  m.trace_r_tilde = rt.trace();
  m.V = 3.0 - m.trace_r_tilde;
  return m;
}

double second_eigenvalue(const Mat3& m) {
  // The iterative solver keeps λ₂ accurate near a repeated zero eigenvalue,
  // where the closed-form one loses about half the digits.
  Eigen::SelfAdjointEigenSolver<Mat3> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues()(1);
}

// ---------------------------------------------------------------------------
// PEWindow

PEWindow::PEWindow(double delta) : delta_(delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("PE window length must be positive");
}

double PEWindow::span() const {
  return samples_.empty() ? 0.0 : samples_.back().t - samples_.front().t;
}

Mat3 PEWindow::averaged_gram() const {
  if (samples_.empty()) return Mat3::Zero();
  const double s = span();
  if (s <= 0.0) return samples_.back().gram;
  return integral_ / s;
}

void PEWindow::refresh_integral() {
  integral_.setZero();
  for (std::size_t j = 1; j < samples_.size(); ++j) {
    integral_ += 0.5 * (samples_[j].t - samples_[j - 1].t) * (samples_[j].gram + samples_[j - 1].gram);
  }
  updates_since_refresh_ = 0;
}

void PEWindow::update(double t, const Eigen::Ref<const Eigen::Matrix<double, 3, Eigen::Dynamic>>& v) {
  if (!samples_.empty() && t < samples_.back().t) {
    throw std::invalid_argument("PE window samples must have non-decreasing time");
  }
  const Mat3 g = v * v.transpose();
  if (!samples_.empty()) {
    const Sample& last = samples_.back();
    integral_ += 0.5 * (t - last.t) * (g + last.gram);
  }
  samples_.push_back({t, g});

  const double horizon = t - delta_ - 1e-9 * std::max(1.0, delta_);
  while (samples_.size() > 1 && samples_.front().t < horizon) {
    const Sample& a = samples_[0];
    const Sample& b = samples_[1];
    integral_ -= 0.5 * (b.t - a.t) * (a.gram + b.gram);
    samples_.pop_front();
  }

  // Bound round-off drift of the running sum.
  if (++updates_since_refresh_ >= std::max<std::size_t>(samples_.size(), 64)) refresh_integral();

  mu_hat_ = std::max(0.0, second_eigenvalue(averaged_gram()));
}

// ---------------------------------------------------------------------------
// ε-conditions and θ*

double epsilon_lemma1(const Vec3& a, const Rotation& r, const Vec3& b1, const Vec3& b2) {
  const Vec3 n = b1.cross(b2);
  if (n.norm() <= 1e-9) throw CollinearReferences("b1 and b2 are collinear");
  if (a.norm() == 0.0) throw CollinearReferences("measurement direction a is zero");
  const Vec3 b_bar = n.normalized();
  return a.normalized().cross(r.matrix().transpose() * b_bar).norm();
}

double epsilon_lemma2(const Vec3& a1, const Vec3& a2, const Rotation& r, const Vec3& b1) {
  const Vec3 n = a1.cross(a2);
  if (n.norm() <= 1e-9) throw CollinearReferences("a1 and a2 are collinear");
  if (b1.norm() == 0.0) throw CollinearReferences("reference vector b1 is zero");
  const Vec3 a_bar = n.normalized();
  return a_bar.cross((r.matrix().transpose() * b1).normalized()).norm();
}

double theta_star_margin(double theta_star, double epsilon) {
  return std::cos(0.5 * theta_star) * std::cos(theta_star) - epsilon;
}

double solve_theta_star(double epsilon) {
  if (!(epsilon >= 0.0) || epsilon >= 1.0) {
    throw NoSolution("θ* exists only for 0 <= ε < 1 (got " + std::to_string(epsilon) + ")");
  }
  if (epsilon == 0.0) return 0.5 * kPi;
  // f(θ) = cos(θ/2)cos(θ) − ε is strictly decreasing on (0, π/2).
  double lo = 0.0;
  double hi = 0.5 * kPi;
  while (hi - lo > 1e-13) {
    const double mid = 0.5 * (lo + hi);
    if (theta_star_margin(mid, epsilon) > 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

bool basin_check(const ErrorMetrics& metrics, double theta_star) {
  return metrics.trace_r_tilde >= 1.0 + 2.0 * std::cos(theta_star) - 1e-12;
}

BasinCertificate certify(const ErrorMetrics& metrics, double theta_star, double epsilon) {
  BasinCertificate c;
  c.theta_star = theta_star;
  c.epsilon = epsilon;
  c.margin = theta_star_margin(theta_star, epsilon);
  c.inside_basin = basin_check(metrics, theta_star);
  return c;
}

// ---------------------------------------------------------------------------
// Lyapunov decompositions

namespace {

double spectral_norm_symmetric(const Mat3& m) {
  Eigen::SelfAdjointEigenSolver<Mat3> es(m, Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

double bound_factor(const std::optional<CertificateBound>& bound) {
  if (!bound) return std::numeric_limits<double>::quiet_NaN();
  return std::cos(bound->theta_star) - bound->epsilon / std::cos(0.5 * bound->theta_star);
}

}  // namespace

LyapunovDecomposition lyapunov_decompose_lemma1(const Vec3& a, const Rotation& r,
                                                const Rotation& r_hat, const Vec3& b1,
                                                const Vec3& b2, double k,
                                                std::optional<CertificateBound> bound) {
  const Vec3 n = b1.cross(b2);
  if (n.norm() <= 1e-9) throw ConfigurationMismatch("lemma-1 decomposition needs non-collinear b1, b2");
  if (a.norm() == 0.0) throw ConfigurationMismatch("lemma-1 decomposition needs a non-zero direction");

  const Vec3 b_bar = n.normalized();
  const Vec3 a_hat = a.normalized();
  const Mat3 rt = attitude_error(r, r_hat).matrix();
  const Vec3 ra = r * a_hat;
  const Vec3 rha = r_hat * a_hat;

  const Vec3 x = rha - ra;
  const Vec3 z = rt * rt * ra - ra;
  const Mat3 pi_ra = Mat3::Identity() - ra * ra.transpose();
  const Mat3 e = ra * ra.transpose() - b_bar * b_bar.transpose();

  LyapunovDecomposition d;
  d.V0 = -k * x.dot(pi_ra * z);
  d.V_E = -k * x.dot(e * z);
  d.E_norm = spectral_norm_symmetric(e);
  d.bound_rhs = -k * (1.0 - ra.dot(rt * rt * ra)) * bound_factor(bound);
  return d;
}

LyapunovDecomposition lyapunov_decompose_lemma2(const Vec3& a1, const Vec3& a2,
                                                const Rotation& r, const Rotation& r_hat,
                                                const Vec3& b1, double k,
                                                std::optional<CertificateBound> bound) {
  const Vec3 n = a1.cross(a2);
  if (n.norm() <= 1e-9) throw ConfigurationMismatch("lemma-2 decomposition needs non-collinear a1, a2");
  if (b1.norm() == 0.0) throw ConfigurationMismatch("lemma-2 decomposition needs a non-zero reference");

  const Vec3 a_bar = n.normalized();
  const Vec3 b_hat = b1.normalized();
  const Mat3 rt = attitude_error(r, r_hat).matrix();
  const Vec3 rab = r * a_bar;

  const Vec3 x = rt.transpose() * b_hat - b_hat;
  const Vec3 z = (rt * rt).transpose() * b_hat - b_hat;
  const Mat3 pi_b = Mat3::Identity() - b_hat * b_hat.transpose();
  const Mat3 e = b_hat * b_hat.transpose() - rab * rab.transpose();

  LyapunovDecomposition d;
  d.V0 = -k * x.dot(pi_b * z);
  d.V_E = -k * x.dot(e * z);
  d.E_norm = spectral_norm_symmetric(e);
  d.bound_rhs = -k * (1.0 - b_hat.dot(rt * rt * b_hat)) * bound_factor(bound);
  return d;
}

ProjectorDiagnostic theorem1_diagnostic(const DirectionMatrix& lambda, const Rotation& r,
                                        const Rotation& r_hat) {
  const SensorChannel channel(Vec3::UnitX(), lambda);
  const Mat3 proj = lambda_pinv(channel).projector;
  const Mat3 rt = attitude_error(r, r_hat).matrix();

  ProjectorDiagnostic d;
  d.P = r.matrix() * proj * r.matrix().transpose();
  d.P_hat = rt * d.P * rt.transpose();
  d.predicted_rate = (d.P - d.P * rt * rt).trace();
  return d;
}

double projector_rate(const Mat3& m, const Rotation& r_tilde, double k) {
  const Mat3& rt = r_tilde.matrix();
  return -k * (m - m * rt * rt).trace();
}

double lyapunov_rate(const Vec3& delta, const Rotation& r_tilde) {
  return -(hat(delta) * r_tilde.matrix()).trace();
}

}  // namespace scalarcf
