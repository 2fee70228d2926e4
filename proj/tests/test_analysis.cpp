#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <stdexcept>

#include "oracles.hpp"
#include "scalarcf/analysis.hpp"
#include "scalarcf/errors.hpp"
#include "scalarcf/observer.hpp"

using namespace scalarcf;

namespace {

DirectionMatrix cols(std::initializer_list<Vec3> vs) {
  DirectionMatrix m(3, static_cast<Eigen::Index>(vs.size()));
  Eigen::Index j = 0;
  for (const auto& v : vs) m.col(j++) = v;
  return m;
}

Rotation random_rot(std::mt19937_64& rng) { return Rotation::unchecked(oracle::random_rotation(rng)); }

// Rotation by a random axis and the given angle.
Mat3 rotation_by(std::mt19937_64& rng, double angle) {
  const Vec3 u = oracle::random_vector(rng).normalized();
  return oracle::expm(oracle::cross_matrix(angle * u));
}

}  // namespace

TEST(ErrorMetrics, AngleAndPotential) {
  std::mt19937_64 rng(41);
  for (double angle : {0.0, 0.1, 1.0, 2.5, 3.1}) {
    const Mat3 r = oracle::random_rotation(rng);
    const Mat3 rt = rotation_by(rng, angle);
    const ErrorMetrics m = error_metrics(Rotation::unchecked(r), Rotation::unchecked(rt * r));
    EXPECT_NEAR(m.theta_tilde, angle, 1e-9);
    EXPECT_NEAR(m.V, 2.0 * (1.0 - std::cos(angle)), 1e-12);
    EXPECT_NEAR(m.trace_r_tilde, 1.0 + 2.0 * std::cos(angle), 1e-12);
  }
}

TEST(ErrorMetrics, RightInvariantError) {
  std::mt19937_64 rng(42);
  const Mat3 r = oracle::random_rotation(rng);
  const Mat3 rh = oracle::random_rotation(rng);
  const Mat3 e = attitude_error(Rotation::unchecked(r), Rotation::unchecked(rh)).matrix();
  EXPECT_LT((e - rh * r.transpose()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(SecondEigenvalue, SortedAscending) {
  std::mt19937_64 rng(43);
  const Mat3 q = oracle::random_rotation(rng);
  const Mat3 m = q * Vec3(5.0, -1.0, 2.0).asDiagonal() * q.transpose();
  EXPECT_NEAR(second_eigenvalue(m), 2.0, 1e-12);
}

TEST(PEWindow, RejectsBadInput) {
  EXPECT_THROW(PEWindow(0.0), std::invalid_argument);
  EXPECT_THROW(PEWindow(-1.0), std::invalid_argument);
  PEWindow w(1.0);
  w.update(1.0, Vec3::UnitX());
  EXPECT_THROW(w.update(0.5, Vec3::UnitX()), std::invalid_argument);
}

TEST(PEWindow, SingleSampleReportsInstantGram) {
  PEWindow w(1.0);
  Eigen::Matrix<double, 3, 2> v;
  v << 1, 0, 0, 2, 0, 0;
  w.update(0.0, v);
  EXPECT_EQ(w.sample_count(), 1u);
  EXPECT_EQ(w.span(), 0.0);
  EXPECT_NEAR(w.mu_hat(), 1.0, 1e-12);
}

TEST(PEWindow, RotatingVectorMatchesAnalyticAverage) {
  // v(t) = (cos ωt, sin ωt, 0): the windowed average of vvᵀ has the closed
  // form below, with the zero eigenvalue along e₃.
  const double omega = 1.3;
  const double delta = 2.0;
  const double dt = 1e-3;
  PEWindow w(delta);
  for (int i = 0; i <= 6000; ++i) {
    const double t = i * dt;
    w.update(t, Vec3(std::cos(omega * t), std::sin(omega * t), 0.0));
    if (t < delta || i % 500 != 0) continue;
    const double a = t - delta;
    const double s2 = (std::sin(2 * omega * t) - std::sin(2 * omega * a)) / (4 * omega * delta);
    const double c2 = (std::cos(2 * omega * a) - std::cos(2 * omega * t)) / (4 * omega * delta);
    Mat3 g = Mat3::Zero();
    g(0, 0) = 0.5 + s2;
    g(1, 1) = 0.5 - s2;
    g(0, 1) = g(1, 0) = c2;
    Eigen::SelfAdjointEigenSolver<Mat3> es(g);
    EXPECT_NEAR(w.span(), delta, 1e-9);
    EXPECT_LT((w.averaged_gram() - g).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_NEAR(w.mu_hat(), es.eigenvalues()(1), 1e-6);
  }
}

TEST(PEWindow, EvictsOldSamples) {
  PEWindow w(1.0);
  for (int i = 0; i <= 100; ++i) w.update(0.1 * i, i < 50 ? Vec3::UnitX() : Vec3::UnitY());
  // Only e₂ remains in the window, so the average is rank one.
  EXPECT_NEAR(w.averaged_gram()(1, 1), 1.0, 1e-12);
  EXPECT_NEAR(w.averaged_gram()(0, 0), 0.0, 1e-12);
  EXPECT_EQ(w.mu_hat(), 0.0);
  EXPECT_EQ(w.sample_count(), 11u);
}

TEST(Epsilon, Lemma1Geometry) {
  // b̄ = e₃; a tilted by 20° from e₃ in the x-z plane.
  const Vec3 a(std::sin(deg2rad(20.0)), 0.0, std::cos(deg2rad(20.0)));
  EXPECT_NEAR(epsilon_lemma1(a, Rotation::identity(), Vec3::UnitX(), Vec3::UnitY()),
              std::sin(deg2rad(20.0)), 1e-12);
  EXPECT_NEAR(epsilon_lemma1(Vec3::UnitZ(), Rotation::identity(), Vec3::UnitX(), 3.0 * Vec3::UnitY()),
              0.0, 1e-12);
  EXPECT_NEAR(epsilon_lemma1(Vec3::UnitX(), Rotation::identity(), Vec3::UnitX(), Vec3::UnitY()), 1.0,
              1e-12);
}

TEST(Epsilon, Lemma2Geometry) {
  // ā = e₃; R rotates b₁ = e₁ into the body frame.
  const Rotation r = rot_y(deg2rad(-70.0));
  EXPECT_NEAR(epsilon_lemma2(Vec3::UnitX(), Vec3::UnitY(), r, Vec3::UnitX()), std::sin(deg2rad(20.0)),
              1e-12);
}

TEST(Epsilon, CollinearInputsThrow) {
  EXPECT_THROW(epsilon_lemma1(Vec3::UnitZ(), Rotation::identity(), Vec3::UnitX(), 2.0 * Vec3::UnitX()),
               CollinearReferences);
  EXPECT_THROW(epsilon_lemma1(Vec3::Zero(), Rotation::identity(), Vec3::UnitX(), Vec3::UnitY()),
               CollinearReferences);
  EXPECT_THROW(epsilon_lemma2(Vec3::UnitX(), -Vec3::UnitX(), Rotation::identity(), Vec3::UnitZ()),
               CollinearReferences);
  EXPECT_THROW(epsilon_lemma2(Vec3::UnitX(), Vec3::UnitY(), Rotation::identity(), Vec3::Zero()),
               CollinearReferences);
}

TEST(ThetaStar, ReferenceValues) {
  // ε = sin 15° for the yaw sweep, and the pitot worst case with a 20° tilt
  // margin and a 25° sideslip.
  EXPECT_NEAR(rad2deg(solve_theta_star(std::sin(deg2rad(15.0)))), 71.4, 0.05);
  const double c = std::cos(deg2rad(25.0)) * std::sin(deg2rad(25.0));
  EXPECT_NEAR(rad2deg(solve_theta_star(std::sqrt(1.0 - c * c))), 20.23, 0.005);
}

TEST(ThetaStar, RootHasZeroMargin) {
  for (double eps : {0.01, 0.2, 0.5, 0.9, 0.999}) {
    const double th = solve_theta_star(eps);
    EXPECT_NEAR(std::cos(th / 2) * std::cos(th), eps, 1e-12);
    EXPECT_NEAR(theta_star_margin(th, eps), 0.0, 1e-12);
    EXPECT_GT(th, 0.0);
    EXPECT_LT(th, kPi / 2);
  }
}

TEST(ThetaStar, MonotoneInEpsilon) {
  double prev = kPi / 2;
  for (double eps = 0.05; eps < 1.0; eps += 0.05) {
    const double th = solve_theta_star(eps);
    EXPECT_LT(th, prev);
    prev = th;
  }
}

TEST(ThetaStar, Limits) {
  EXPECT_DOUBLE_EQ(solve_theta_star(0.0), kPi / 2);
  EXPECT_THROW(solve_theta_star(1.0), NoSolution);
  EXPECT_THROW(solve_theta_star(-0.1), NoSolution);
  EXPECT_THROW(solve_theta_star(std::nan("")), NoSolution);
}

TEST(Basin, BoundaryInclusive) {
  const double th = deg2rad(40.0);
  ErrorMetrics m;
  m.trace_r_tilde = 1.0 + 2.0 * std::cos(th);
  EXPECT_TRUE(basin_check(m, th));
  m.trace_r_tilde -= 1e-9;
  EXPECT_FALSE(basin_check(m, th));
  m.trace_r_tilde = 3.0;
  EXPECT_TRUE(basin_check(m, th));
}

TEST(Basin, CertifyReportsMargin) {
  ErrorMetrics m;
  m.trace_r_tilde = 3.0;
  const BasinCertificate c = certify(m, deg2rad(30.0), 0.2);
  EXPECT_NEAR(c.margin, std::cos(deg2rad(15.0)) * std::cos(deg2rad(30.0)) - 0.2, 1e-15);
  EXPECT_TRUE(c.valid());
  EXPECT_TRUE(c.inside_basin);
  EXPECT_FALSE(certify(m, deg2rad(80.0), 0.5).valid());
}

TEST(Lyapunov, Lemma1DecompositionSumsToRate) {
  std::mt19937_64 rng(44);
  for (int i = 0; i < 300; ++i) {
    const Vec3 a = oracle::random_vector(rng);
    const Vec3 b1 = oracle::random_vector(rng);
    const Vec3 b2 = oracle::random_vector(rng);
    const Rotation r = random_rot(rng);
    const Rotation rh = random_rot(rng);
    const double k = 0.9;
    const LyapunovDecomposition d = lyapunov_decompose_lemma1(a, r, rh, b1, b2, k);
    const Vec3 delta = oracle::lemma1_delta(a, b1, b2, r.matrix(), rh.matrix(), k);
    const Mat3 rt = rh.matrix() * r.matrix().transpose();
    EXPECT_NEAR(d.V0 + d.V_E, -(oracle::cross_matrix(delta) * rt).trace(), 1e-10);
    EXPECT_NEAR(d.E_norm, epsilon_lemma1(a, r, b1, b2), 1e-10);
    // V₀ = −k(âᵀR̂ᵀRâ)(1 − âᵀRᵀR̃²Râ) ≤ −k cos θ̃ (1 − âᵀRᵀR̃²Râ).
    const Vec3 ra = r.matrix() * a.normalized();
    const Vec3 rha = rh.matrix() * a.normalized();
    const double gap = 1.0 - ra.dot(rt * rt * ra);
    EXPECT_NEAR(d.V0, -k * rha.dot(ra) * gap, 1e-10);
    EXPECT_LE(d.V0, -k * std::cos(oracle::angle(rt)) * gap + 1e-10);
    EXPECT_TRUE(std::isnan(d.bound_rhs));
  }
}

TEST(Lyapunov, Lemma2DecompositionSumsToRate) {
  std::mt19937_64 rng(45);
  for (int i = 0; i < 300; ++i) {
    const Vec3 a1 = oracle::random_vector(rng);
    const Vec3 a2 = oracle::random_vector(rng);
    const Vec3 b = oracle::random_vector(rng);
    const Rotation r = random_rot(rng);
    const Rotation rh = random_rot(rng);
    const double k = 1.7;
    const LyapunovDecomposition d = lyapunov_decompose_lemma2(a1, a2, r, rh, b, k);
    const Vec3 delta = oracle::lemma2_delta(a1, a2, b, r.matrix(), rh.matrix(), k);
    const Mat3 rt = rh.matrix() * r.matrix().transpose();
    EXPECT_NEAR(d.V0 + d.V_E, -(oracle::cross_matrix(delta) * rt).trace(), 1e-10);
    EXPECT_NEAR(d.E_norm, epsilon_lemma2(a1, a2, r, b), 1e-10);
    // Same structure with b̂ in place of Râ and R̃ᵀb̂ in place of R̂â.
    const Vec3 bh = b.normalized();
    const double gap = 1.0 - bh.dot(rt * rt * bh);
    EXPECT_NEAR(d.V0, -k * bh.dot(rt * bh) * gap, 1e-10);
    EXPECT_LE(d.V0, -k * std::cos(oracle::angle(rt)) * gap + 1e-10);
  }
}

TEST(Lyapunov, Lemma1BoundHoldsInsideBasin) {
  std::mt19937_64 rng(46);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double eps_bound = 0.3;
  const double th = solve_theta_star(eps_bound);
  int checked = 0;
  while (checked < 500) {
    const Vec3 b1 = oracle::random_vector(rng);
    const Vec3 b2 = oracle::random_vector(rng);
    const Rotation r = random_rot(rng);
    // Body direction within asin(ε_bound) of Rᵀb̄.
    const Vec3 b_body = r.matrix().transpose() * b1.cross(b2).normalized();
    const Vec3 a = rotation_by(rng, std::asin(eps_bound) * u(rng)) * b_body;
    const Rotation rh = Rotation::unchecked(rotation_by(rng, th * u(rng)) * r.matrix());
    const double eps = epsilon_lemma1(a, r, b1, b2);
    ASSERT_LE(eps, eps_bound + 1e-12);
    const LyapunovDecomposition d =
        lyapunov_decompose_lemma1(a, r, rh, b1, b2, 1.0, CertificateBound{th, eps_bound});
    EXPECT_LE(d.V0 + d.V_E, d.bound_rhs + 1e-12);
    // At the root θ* the factor cos θ* − ε/cos(θ*/2) vanishes up to round-off.
    EXPECT_LE(d.bound_rhs, 1e-12);
    ++checked;
  }
}

TEST(Lyapunov, MismatchedConfigurationThrows) {
  const Rotation id = Rotation::identity();
  EXPECT_THROW(lyapunov_decompose_lemma1(Vec3::UnitX(), id, id, Vec3::UnitY(), Vec3::UnitY(), 1.0),
               ConfigurationMismatch);
  EXPECT_THROW(lyapunov_decompose_lemma2(Vec3::UnitX(), Vec3::UnitX(), id, id, Vec3::UnitY(), 1.0),
               ConfigurationMismatch);
  EXPECT_THROW(lyapunov_decompose_lemma2(Vec3::UnitX(), Vec3::UnitY(), id, id, Vec3::Zero(), 1.0),
               ConfigurationMismatch);
}

TEST(LyapunovRate, MatchesTraceFormula) {
  std::mt19937_64 rng(47);
  const Vec3 d = oracle::random_vector(rng);
  const Mat3 rt = oracle::random_rotation(rng);
  EXPECT_NEAR(lyapunov_rate(d, Rotation::unchecked(rt)), -(oracle::cross_matrix(d) * rt).trace(), 1e-14);
  // −tr([Δ]×R̃) = Δ·vee(R̃ − R̃ᵀ).
  const Vec3 w(rt(2, 1) - rt(1, 2), rt(0, 2) - rt(2, 0), rt(1, 0) - rt(0, 1));
  EXPECT_NEAR(lyapunov_rate(d, Rotation::unchecked(rt)), d.dot(w), 1e-14);
}

TEST(ProjectorRate, NonPositiveForProjectors) {
  std::mt19937_64 rng(48);
  for (int i = 0; i < 100; ++i) {
    const Vec3 n = oracle::random_vector(rng).normalized();
    const Mat3 p = Mat3::Identity() - n * n.transpose();
    const Rotation rt = random_rot(rng);
    EXPECT_LE(projector_rate(p, rt, 1.0), 1e-12);
  }
  EXPECT_NEAR(projector_rate(Mat3::Identity(), Rotation::identity(), 2.0), 0.0, 1e-15);
}
