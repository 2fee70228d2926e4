#include <gtest/gtest.h>

#include <cmath>

#include "scalarcf/analysis.hpp"
#include "scalarcf/engine.hpp"
#include "scalarcf/errors.hpp"

using namespace scalarcf;

namespace {

DirectionMatrix cols(std::initializer_list<Vec3> vs) {
  DirectionMatrix m(3, static_cast<Eigen::Index>(vs.size()));
  Eigen::Index j = 0;
  for (const auto& v : vs) m.col(j++) = v;
  return m;
}

ScenarioConfig short_config(ScenarioId id, double duration = 2.0, double dt = 0.01) {
  ScenarioConfig cfg = default_config(id);
  cfg.duration = duration;
  cfg.dt = dt;
  return cfg;
}

}  // namespace

TEST(Regime, ClassifiesBanks) {
  const Vec3 x = Vec3::UnitX();
  const Vec3 y = Vec3::UnitY();
  const Vec3 z = Vec3::UnitZ();
  const DirectionMatrix e1 = cols({x});
  EXPECT_EQ(classify_regime(SensorBank({SensorChannel(x, e1), SensorChannel(y, e1), SensorChannel(z, e1)})),
            Regime::Theorem1);
  EXPECT_EQ(classify_regime(SensorBank({SensorChannel(x, e1), SensorChannel(y, e1)})), Regime::Lemma1);
  EXPECT_EQ(classify_regime(SensorBank({SensorChannel(x, cols({x, y}))})), Regime::Lemma2);
  EXPECT_EQ(classify_regime(SensorBank({SensorChannel(x, DirectionMatrix(Mat3::Identity())),
                                        SensorChannel(y, DirectionMatrix(Mat3::Identity()))})),
            Regime::VectorBaseline);
  // Mixed directions and coplanar references fall outside the named cases.
  EXPECT_EQ(classify_regime(SensorBank({SensorChannel(x, e1), SensorChannel(y, cols({y}))})),
            Regime::Generic);
  EXPECT_EQ(classify_regime(SensorBank({SensorChannel(x, e1), SensorChannel(y, e1),
                                        SensorChannel(x + y, e1)})),
            Regime::Generic);
  EXPECT_EQ(to_string(Regime::Lemma2), "lemma2");
}

TEST(Run, GridAndShape) {
  const ScenarioConfig cfg = short_config(ScenarioId::Sim2, 1.0, 0.01);
  const auto recs = run(cfg, default_variants(ScenarioId::Sim2));
  ASSERT_EQ(recs.size(), 2u);
  for (const auto& rec : recs) {
    ASSERT_EQ(rec.rows.size(), 101u);
    EXPECT_EQ(rec.dt, 0.01);
    for (std::size_t i = 0; i < rec.rows.size(); ++i) EXPECT_NEAR(rec.rows[i].t, i * 0.01, 1e-12);
  }
  EXPECT_EQ(recs[0].regime, Regime::Lemma1);
  EXPECT_EQ(recs[1].regime, Regime::VectorBaseline);
  ASSERT_TRUE(recs[0].theta_star);
  EXPECT_NEAR(rad2deg(*recs[0].theta_star), 71.41, 0.01);
  EXPECT_FALSE(recs[1].theta_star);
}

TEST(Run, InitialRowMatchesConfig) {
  const ScenarioConfig cfg = short_config(ScenarioId::Sim3);
  const auto recs = run(cfg, {Variant::scalar(2)});
  const ErrorMetrics m = error_metrics(cfg.R0_true, cfg.R0_hat);
  const RunRow& r0 = recs[0].rows.front();
  EXPECT_NEAR(r0.theta_tilde_deg, rad2deg(m.theta_tilde), 1e-12);
  EXPECT_NEAR(r0.V, m.V, 1e-12);
  EXPECT_EQ(r0.t, 0.0);
  const EulerZyx e = to_euler_zyx(cfg.R0_hat);
  EXPECT_NEAR(r0.yaw_deg, rad2deg(e.yaw), 1e-12);
}

TEST(Run, DeterministicWithoutNoise) {
  const ScenarioConfig cfg = short_config(ScenarioId::Sim1);
  const auto a = run(cfg, default_variants(ScenarioId::Sim1));
  const auto b = run(cfg, default_variants(ScenarioId::Sim1));
  for (std::size_t v = 0; v < a.size(); ++v) {
    for (std::size_t i = 0; i < a[v].rows.size(); ++i) {
      ASSERT_EQ(a[v].rows[i].V, b[v].rows[i].V);
    }
  }
}

TEST(Run, SeededNoise) {
  ScenarioConfig cfg = short_config(ScenarioId::Sim2);
  cfg.noise_std = 0.05;
  cfg.seed = 7;
  const auto a = run(cfg, {Variant::scalar(2)});
  const auto b = run(cfg, {Variant::scalar(2)});
  cfg.seed = 8;
  const auto c = run(cfg, {Variant::scalar(2)});
  cfg.noise_std = 0.0;
  const auto clean = run(cfg, {Variant::scalar(2)});
  EXPECT_EQ(a[0].rows.back().V, b[0].rows.back().V);
  EXPECT_NE(a[0].rows.back().V, c[0].rows.back().V);
  EXPECT_NE(a[0].rows.back().V, clean[0].rows.back().V);
}

TEST(Run, ColumnsPerRegime) {
  const ScenarioConfig cfg = short_config(ScenarioId::Sim1);
  const auto recs = run(cfg, default_variants(ScenarioId::Sim1));
  for (const auto& rec : recs) {
    const RunRow& r = rec.rows[10];
    // Sim 1 carries no basin certificate.
    EXPECT_TRUE(std::isnan(r.epsilon_value));
    EXPECT_TRUE(std::isnan(r.margin));
    EXPECT_EQ(r.V_E, 0.0);
    EXPECT_NEAR(r.V0, r.V_dot_closed, 1e-10 * std::max(1.0, rec.gain));
    EXPECT_LT(r.orthonormality_error, 1e-12);
  }
  const auto s2 = run(short_config(ScenarioId::Sim2), {Variant::scalar(2)});
  const RunRow& r = s2[0].rows[10];
  EXPECT_NEAR(r.V0 + r.V_E, r.V_dot_closed, 1e-10);
  EXPECT_FALSE(std::isnan(r.epsilon_value));
  EXPECT_GT(r.margin, 0.0);
  EXPECT_TRUE(r.inside_basin);
}

TEST(Run, PotentialDecreasesForTheorem1) {
  const ScenarioConfig cfg = short_config(ScenarioId::Custom, 10.0, 0.01);
  const auto recs = run(cfg, {Variant::scalar(3)});
  const auto& rows = recs[0].rows;
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LE(rows[i].V, rows[i - 1].V + 1e-12);
  EXPECT_LT(rows.back().V, rows.front().V);
}

TEST(Run, RejectsBadRequests) {
  const ScenarioConfig cfg = short_config(ScenarioId::Sim2);
  EXPECT_THROW(run(cfg, {}), IncompatibleVariant);
  EXPECT_THROW(run(cfg, {Variant::scalar(6)}), IncompatibleVariant);
  ScenarioConfig bad = cfg;
  bad.dt = -1.0;
  EXPECT_THROW(run(bad, {Variant::scalar(2)}), ConfigError);
}

TEST(Run, CustomInitialTruthIsKept) {
  ScenarioConfig cfg = short_config(ScenarioId::Custom);
  cfg.R0_true = euler_zyx(0.1, 0.2, 0.3);
  cfg.R0_hat = cfg.R0_true;
  const auto recs = run(cfg, {Variant::scalar(3)});
  for (const auto& row : recs[0].rows) EXPECT_LT(row.theta_tilde_deg, 1e-9);
}

TEST(DifferentiatePotential, ExactOnQuadratic) {
  std::vector<RunRow> rows(7);
  const double dt = 0.25;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double t = i * dt;
    rows[i].V = 3.0 * t * t - 2.0 * t + 1.0;
  }
  differentiate_potential(rows, dt);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    EXPECT_NEAR(rows[i].V_dot_numeric, 6.0 * i * dt - 2.0, 1e-12);
  }
}

TEST(DifferentiatePotential, ShortSeries) {
  std::vector<RunRow> two(2);
  two[1].V = 0.5;
  differentiate_potential(two, 0.5);
  EXPECT_EQ(two[0].V_dot_numeric, 1.0);
  EXPECT_EQ(two[1].V_dot_numeric, 1.0);
  std::vector<RunRow> one(1);
  differentiate_potential(one, 0.5);
  EXPECT_TRUE(std::isnan(one[0].V_dot_numeric));
}
