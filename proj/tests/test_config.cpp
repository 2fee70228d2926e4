#include <gtest/gtest.h>

#include <filesystem>
#include <string>

#include "scalarcf/config.hpp"
#include "scalarcf/errors.hpp"

using namespace scalarcf;

namespace {

const std::filesystem::path kConfigDir = SCALARCF_TEST_CONFIG_DIR;

// Runs parse_config and returns the ConfigError it raised.
ConfigError parse_error(const std::string& text) {
  try {
    parse_config(text);
  } catch (const ConfigError& e) {
    return e;
  }
  ADD_FAILURE() << "expected ConfigError for:\n" << text;
  return ConfigError("", 0, "");
}

}  // namespace

TEST(Config, BundledFilesMatchDefaults) {
  for (ScenarioId id : {ScenarioId::Sim1, ScenarioId::Sim2, ScenarioId::Sim3}) {
    const auto path = kConfigDir / (to_string(id) + ".cfg");
    const ScenarioConfig cfg = load_config(path);
    EXPECT_EQ(cfg.id, id);
    EXPECT_EQ(serialize(cfg), serialize(default_config(id))) << path;
  }
}

TEST(Config, SerializeRoundTrips) {
  for (ScenarioId id : {ScenarioId::Sim1, ScenarioId::Sim2, ScenarioId::Sim3, ScenarioId::Custom}) {
    ScenarioConfig cfg = default_config(id);
    cfg.dt = 1.0 / 3.0 * 1e-2;
    cfg.seed = 18446744073709551615ull;
    cfg.noise_std = 0.1;
    if (id == ScenarioId::Sim2) cfg.epsilon_bound = 0.3;
    const std::string text = serialize(cfg);
    const ScenarioConfig back = parse_config(text);
    EXPECT_EQ(serialize(back), text);
    EXPECT_EQ(back.dt, cfg.dt);
    EXPECT_EQ(back.seed, cfg.seed);
    EXPECT_EQ(back.R0_hat.matrix(), cfg.R0_hat.matrix());
    EXPECT_EQ(back.epsilon_bound, cfg.epsilon_bound);
  }
}

TEST(Config, UnitsAndDefaults) {
  const ScenarioConfig cfg = parse_config(
      "scenario = sim2\n"
      "# comment line\n"
      "psi0 = 10 deg   # trailing comment\n"
      "phi0 = 0.2 rad\n"
      "omega = 0.25\n");
  EXPECT_NEAR(cfg.psi0, deg2rad(10.0), 1e-16);
  EXPECT_EQ(cfg.phi0, 0.2);
  EXPECT_EQ(cfg.omega, 0.25);
  EXPECT_EQ(cfg.duration, default_config(ScenarioId::Sim2).duration);
}

TEST(Config, ScenarioArgumentSelectsDefaults) {
  const ScenarioConfig cfg = parse_config("duration = 5\n", ScenarioId::Sim3);
  EXPECT_EQ(cfg.id, ScenarioId::Sim3);
  EXPECT_EQ(cfg.duration, 5.0);
  EXPECT_THROW(parse_config("duration = 5\n"), ConfigError);
  EXPECT_THROW(parse_config("scenario = sim1\n", ScenarioId::Sim2), ConfigError);
  EXPECT_NO_THROW(parse_config("scenario = sim1\n", ScenarioId::Sim1));
}

TEST(Config, RotationForms) {
  const ScenarioConfig a = parse_config("scenario = sim3\nR0_hat = ypr(15, 10, 7.5) deg\n");
  EXPECT_EQ(a.R0_hat.matrix(), default_config(ScenarioId::Sim3).R0_hat.matrix());
  const ScenarioConfig b = parse_config("scenario = sim3\nR0_hat = matrix(0,-1,0, 1,0,0, 0,0,1)\n");
  Mat3 quarter;
  quarter << 0, -1, 0, 1, 0, 0, 0, 0, 1;
  EXPECT_EQ(b.R0_hat.matrix(), quarter);
  const ScenarioConfig c = parse_config("scenario = sim3\nR0_hat = identity\n");
  EXPECT_EQ(c.R0_hat.matrix(), Mat3::Identity());
}

TEST(Config, CustomScenario) {
  const ScenarioConfig cfg = parse_config(
      "scenario = custom\n"
      "references = (1, 0, 0); (0, 1, 0)\n"
      "directions = (1, 0, 0); (0, 0, 1)\n"
      "omega_body = (0, 0, 0.1)\n"
      "R0_true = ypr(10, 0, 0) deg\n");
  ASSERT_EQ(cfg.references.size(), 2u);
  ASSERT_EQ(cfg.directions.size(), 2u);
  EXPECT_EQ(cfg.directions[1], Vec3::UnitZ());
  EXPECT_EQ(cfg.omega_body, Vec3(0, 0, 0.1));
  EXPECT_LT((cfg.R0_true.matrix() - rot_z(deg2rad(10.0)).matrix()).norm(), 1e-15);
}

TEST(Config, ErrorsCarryLineAndField) {
  const ConfigError e = parse_error("scenario = sim2\n\npsi0 = abc\n");
  EXPECT_EQ(e.line(), 3);
  EXPECT_EQ(e.field(), "psi0");
  EXPECT_NE(std::string(e.what()).find("line 3"), std::string::npos);
}

TEST(Config, ValidationErrorPointsAtKey) {
  const ConfigError e = parse_error("scenario = sim2\nduration = 10\npsi0 = 45 deg\n");
  EXPECT_EQ(e.line(), 3);
  EXPECT_EQ(e.field(), "psi0");
}

TEST(Config, RejectsMalformedInput) {
  EXPECT_EQ(parse_error("scenario = sim1\nbogus = 1\n").line(), 2);
  EXPECT_EQ(parse_error("scenario = sim1\ndt = 0.1\ndt = 0.2\n").line(), 3);
  EXPECT_EQ(parse_error("scenario = sim1\nno equals sign\n").line(), 2);
  EXPECT_EQ(parse_error("scenario = sim1\nduration = 10 deg\n").field(), "duration");
  EXPECT_EQ(parse_error("scenario = sim1\nR0_true = identity\n").field(), "R0_true");
  EXPECT_EQ(parse_error("scenario = sim1\nR0_hat = matrix(1,0,0, 0,1,0, 0,0,2)\n").field(), "R0_hat");
  EXPECT_EQ(parse_error("scenario = custom\nomega_body = (1, 2)\n").field(), "omega_body");
  EXPECT_EQ(parse_error("scenario = sim1\nseed = -1\n").field(), "seed");
  EXPECT_EQ(parse_error("scenario = sim9\n").line(), 1);
  EXPECT_EQ(parse_error("scenario = sim1\ndt = inf\n").field(), "dt");
}

TEST(Config, LoadReportsMissingFile) {
  EXPECT_THROW(load_config(kConfigDir / "does-not-exist.cfg"), IoError);
}

TEST(Fnv1a, KnownVectors) {
  EXPECT_EQ(fnv1a(""), 0xcbf29ce484222325ull);
  EXPECT_EQ(fnv1a("a"), 0xaf63dc4c8601ec8cull);
  EXPECT_EQ(fnv1a("foobar"), 0x85944171f73967e8ull);
}
