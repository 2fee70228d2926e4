#include "scalarcf/scenarios.hpp"

#include <cmath>
#include <numeric>
#include <string>

#include "scalarcf/errors.hpp"

namespace scalarcf {

std::string to_string(ScenarioId id) {
  switch (id) {
    case ScenarioId::Sim1: return "sim1";
    case ScenarioId::Sim2: return "sim2";
    case ScenarioId::Sim3: return "sim3";
    case ScenarioId::Custom: return "custom";
  }
  return "unknown";
}

ScenarioId parse_scenario_id(const std::string& name) {
  if (name == "sim1") return ScenarioId::Sim1;
  if (name == "sim2") return ScenarioId::Sim2;
  if (name == "sim3") return ScenarioId::Sim3;
  if (name == "custom") return ScenarioId::Custom;
  throw ConfigError("unknown scenario '" + name + "' (expected sim1, sim2, sim3 or custom)", 0,
                    "scenario");
}

std::string Variant::name() const {
  if (kind == Kind::VectorBaseline) return "vector-baseline";
  return "scalar-" + std::to_string(scalars);
}

Variant Variant::parse(const std::string& name) {
  if (name == "vector-baseline") return vector_baseline();
  const std::string prefix = "scalar-";
  if (name.rfind(prefix, 0) == 0 && name.size() > prefix.size()) {
    const std::string digits = name.substr(prefix.size());
    if (digits.find_first_not_of("0123456789") == std::string::npos && digits.size() < 4) {
      const int m = std::stoi(digits);
      if (m >= 1) return scalar(m);
    }
  }
  throw IncompatibleVariant("unknown variant '" + name +
                            "' (expected scalar-<m> or vector-baseline)");
}

namespace {

void require(bool ok, const std::string& field, const std::string& what) {
  if (!ok) throw ConfigError("field '" + field + "': " + what, 0, field);
}

bool open_interval(double x, double lo, double hi) { return x > lo && x < hi; }

}  // namespace

void ScenarioConfig::validate() const {
  require(std::isfinite(duration) && duration > 0.0, "duration", "must be positive");
  require(std::isfinite(dt) && dt > 0.0, "dt", "must be positive");
  require(dt <= duration, "dt", "must not exceed the duration");
  require(k_scalar > 0.0, "k_scalar", "must be positive");
  require(k_vector > 0.0, "k_vector", "must be positive");
  require(pe_window > 0.0, "pe_window", "must be positive");
  require(noise_std >= 0.0, "noise_std", "must be non-negative");
  if (epsilon_bound) {
    require(*epsilon_bound >= 0.0 && *epsilon_bound < 1.0, "epsilon_bound", "must lie in [0, 1)");
  }

  switch (id) {
    case ScenarioId::Sim1:
      require(open_interval(gamma_dip, 0.0, kPi / 2), "gamma_dip", "must lie in (0, 90) deg");
      require(omega >= 0.0, "omega", "must be non-negative");
      require(V_speed > 0.0, "V_speed", "must be positive");
      require(g0 > 0.0, "g0", "must be positive");
      require(hold_start >= 0.0 && hold_end > hold_start, "hold_end",
              "must be greater than hold_start");
      break;
    case ScenarioId::Sim2:
      require(open_interval(gamma_dip, 0.0, kPi / 2), "gamma_dip", "must lie in (0, 90) deg");
      require(open_interval(psi0, 0.0, kPi / 6), "psi0", "must lie in (0, 30) deg");
      require(open_interval(phi0, 0.0, kPi / 6), "phi0", "must lie in (0, 30) deg");
      require(omega != 0.0, "omega", "must be non-zero");
      require(g0 > 0.0, "g0", "must be positive");
      break;
    case ScenarioId::Sim3:
      require(open_interval(gamma_tilt, 0.0, kPi / 2), "gamma_tilt", "must lie in (0, 90) deg");
      require(open_interval(phi_spread, 0.0, kPi / 2), "phi_spread", "must lie in (0, 90) deg");
      require(alpha_max >= 0.0 && alpha_max < gamma_tilt && gamma_tilt < kPi / 2 - alpha_max,
              "alpha_max", "must satisfy alpha_max < gamma_tilt < 90 deg - alpha_max");
      require(beta_max >= 0.0 && beta_max < kPi / 2, "beta_max", "must lie in [0, 90) deg");
      require(V_speed > 0.0, "V_speed", "must be positive");
      break;
    case ScenarioId::Custom:
      require(!references.empty(), "references", "at least one reference vector is required");
      require(!directions.empty() && directions.size() <= 3, "directions",
              "between one and three body directions are required");
      for (const auto& b : references) require(b.allFinite(), "references", "must be finite");
      for (const auto& a : directions) {
        require(a.allFinite() && a.norm() > 0.0, "directions", "must be finite and non-zero");
      }
      require(omega_body.allFinite(), "omega_body", "must be finite");
      break;
  }
}

ScenarioConfig default_config(ScenarioId id) {
  ScenarioConfig cfg;
  cfg.id = id;
  switch (id) {
    case ScenarioId::Sim1:
      cfg.duration = 100.0;
      cfg.k_scalar = 0.5;
      cfg.k_vector = 2.0;
      cfg.psi0 = deg2rad(30.0);
      cfg.phi0 = deg2rad(20.0);
      cfg.omega = 0.5;
      cfg.gamma_dip = deg2rad(60.0);
      cfg.V_speed = 15.0;
      cfg.R0_hat = Rotation::identity();
      break;
    case ScenarioId::Sim2:
      cfg.duration = 240.0;
      cfg.k_scalar = 1.5;
      cfg.k_vector = 2.5;
      cfg.psi0 = deg2rad(15.0);
      cfg.phi0 = deg2rad(15.0);
      cfg.omega = 1.0;
      cfg.gamma_dip = deg2rad(60.0);
      cfg.R0_hat = euler_zyx(deg2rad(-30.0), deg2rad(-45.0), deg2rad(-22.5));
      break;
    case ScenarioId::Sim3:
      cfg.duration = 60.0;
      cfg.k_scalar = 1.5;
      cfg.k_vector = 0.6;
      cfg.alpha_max = deg2rad(20.0);
      cfg.beta_max = deg2rad(25.0);
      cfg.omega_alpha = 0.17;
      cfg.omega_beta = 0.23;
      cfg.omega = 0.35;
      cfg.V_speed = 1.0;
      cfg.gamma_tilt = deg2rad(45.0);
      cfg.phi_spread = deg2rad(20.0);
      cfg.R0_hat = euler_zyx(deg2rad(15.0), deg2rad(10.0), deg2rad(7.5));
      break;
    case ScenarioId::Custom:
      cfg.duration = 60.0;
      cfg.k_scalar = 1.0;
      cfg.k_vector = 1.0;
      cfg.omega_body = Vec3(0.1, 0.2, 0.3);
      cfg.references = {Vec3::UnitX(), Vec3::UnitY(), Vec3::UnitZ()};
      cfg.directions = {Vec3::UnitX()};
      cfg.R0_hat = euler_zyx(deg2rad(60.0), deg2rad(-20.0), deg2rad(30.0));
      break;
  }
  if (id != ScenarioId::Custom) cfg.R0_true = sample(cfg, 0.0).R;
  return cfg;
}

std::vector<Variant> default_variants(ScenarioId id) {
  switch (id) {
    case ScenarioId::Sim1:
      return {Variant::scalar(3), Variant::scalar(6), Variant::vector_baseline()};
    case ScenarioId::Sim2:
    case ScenarioId::Sim3:
      return {Variant::scalar(2), Variant::vector_baseline()};
    case ScenarioId::Custom:
      return {Variant::scalar(3), Variant::vector_baseline()};
  }
  return {};
}

int segment_of(const ScenarioConfig& cfg, double t) {
  if (cfg.id != ScenarioId::Sim1) return 0;
  if (t <= cfg.hold_start) return 0;
  if (t <= cfg.hold_end) return 1;
  return 2;
}

std::vector<double> breakpoints(const ScenarioConfig& cfg) {
  if (cfg.id == ScenarioId::Sim1) return {cfg.hold_start, cfg.hold_end};
  return {};
}

Vec3 gravity_vector(double g0) { return {0.0, 0.0, g0}; }

Vec3 magnetic_field(double gamma_dip) { return {std::cos(gamma_dip), 0.0, std::sin(gamma_dip)}; }

namespace {

DirectionMatrix columns(std::initializer_list<Vec3> cols) {
  DirectionMatrix m(3, static_cast<Eigen::Index>(cols.size()));
  Eigen::Index j = 0;
  for (const auto& c : cols) m.col(j++) = c;
  return m;
}

DirectionMatrix columns(const std::vector<Vec3>& cols) {
  DirectionMatrix m(3, static_cast<Eigen::Index>(cols.size()));
  for (std::size_t j = 0; j < cols.size(); ++j) m.col(static_cast<Eigen::Index>(j)) = cols[j];
  return m;
}

SensorBank common_direction_bank(const std::vector<Vec3>& refs, const DirectionMatrix& lambda) {
  std::vector<SensorChannel> channels;
  channels.reserve(refs.size());
  for (const auto& b : refs) channels.emplace_back(b, lambda);
  return SensorBank(std::move(channels));
}

// Yaw ψ about z and an x-axis oscillation φ, R = R_z(ψ)R_x(φ), with
// Ω = [φ̇, ψ̇ sinφ, ψ̇ cosφ].
struct YawRollState {
  double psi, phi, psi_dot, phi_dot;
};

TrajectorySample yaw_roll_sample(double t, const YawRollState& s) {
  TrajectorySample out;
  out.t = t;
  out.R = euler_zyx(s.psi, 0.0, s.phi);
  out.Omega = Vec3(s.phi_dot, s.psi_dot * std::sin(s.phi), s.psi_dot * std::cos(s.phi));
  return out;
}

TrajectorySample sim1_sample_in(const ScenarioConfig& cfg, double t, int segment) {
  // The hold segment freezes the attitude reached at hold_start; the last
  // segment replays the first one shifted so the attitude is continuous.
  double tau = t;
  double rate = cfg.omega;
  if (segment == 1) {
    tau = cfg.hold_start;
    rate = 0.0;
  } else if (segment == 2) {
    tau = t - (cfg.hold_end - cfg.hold_start);
  }
  const double w = cfg.omega;
  YawRollState s;
  s.psi = -kPi / 2 + cfg.psi0 * std::sin(w * tau);
  s.phi = cfg.phi0 * std::cos(w * tau);
  s.psi_dot = rate * cfg.psi0 * std::cos(w * tau);
  s.phi_dot = -rate * cfg.phi0 * std::sin(w * tau);

  TrajectorySample out = yaw_roll_sample(t, s);
  const Vec3 v = cfg.V_speed * Vec3(std::cos(s.psi), std::sin(s.psi), 0.0);
  out.references = {gravity_vector(cfg.g0), magnetic_field(cfg.gamma_dip), v};
  out.bank = common_direction_bank(out.references, columns({Vec3::UnitX()}));
  return out;
}

}  // namespace

TrajectorySample sim1_sample(const ScenarioConfig& cfg, double t) {
  return sim1_sample_in(cfg, t, segment_of(cfg, t));
}

TrajectorySample sim2_sample(const ScenarioConfig& cfg, double t) {
  const double w = cfg.omega;
  YawRollState s;
  s.psi = -kPi / 2 + cfg.psi0 * std::sin(w * t);
  s.phi = cfg.phi0 * std::cos(w * t);
  s.psi_dot = w * cfg.psi0 * std::cos(w * t);
  s.phi_dot = -w * cfg.phi0 * std::sin(w * t);

  TrajectorySample out = yaw_roll_sample(t, s);
  out.references = {gravity_vector(cfg.g0), magnetic_field(cfg.gamma_dip)};
  out.bank = common_direction_bank(out.references, columns({Vec3::UnitX()}));
  return out;
}

TrajectorySample sim3_sample(const ScenarioConfig& cfg, double t) {
  // R = R_z(ωt − β)R_y(α) keeps Rᵀv_I = V[cosα cosβ, sinβ, sinα cosβ].
  const double alpha = cfg.alpha_max * std::sin(cfg.omega_alpha * t);
  const double beta = cfg.beta_max * std::sin(cfg.omega_beta * t);
  const double alpha_dot = cfg.alpha_max * cfg.omega_alpha * std::cos(cfg.omega_alpha * t);
  const double beta_dot = cfg.beta_max * cfg.omega_beta * std::cos(cfg.omega_beta * t);
  const double yaw_rate = cfg.omega - beta_dot;

  TrajectorySample out;
  out.t = t;
  out.R = euler_zyx(cfg.omega * t - beta, alpha, 0.0);
  out.Omega = Vec3(-yaw_rate * std::sin(alpha), alpha_dot, yaw_rate * std::cos(alpha));
  out.references = {cfg.V_speed * Vec3(std::cos(cfg.omega * t), std::sin(cfg.omega * t), 0.0)};
  const PitotGeometry pitot = pitot_geometry(cfg.gamma_tilt, cfg.phi_spread);
  out.bank = SensorBank({SensorChannel(out.references[0], columns({pitot.a1, pitot.a2}))});
  return out;
}

Vec3 sim3_omega_sin_variant(const ScenarioConfig& cfg, double t) {
  const double yaw_rate = cfg.omega - cfg.beta_max * cfg.omega_beta * std::cos(cfg.omega_beta * t);
  return {-yaw_rate * std::sin(cfg.alpha_max * std::sin(cfg.omega_alpha * t)),
          cfg.alpha_max * cfg.omega_alpha * std::cos(cfg.omega_alpha * t),
          yaw_rate * std::sin(cfg.alpha_max * std::cos(cfg.omega_alpha * t))};
}

TrajectorySample custom_sample(const ScenarioConfig& cfg, double t) {
  TrajectorySample out;
  out.t = t;
  out.R = cfg.R0_true * exp_so3(cfg.omega_body * t);
  out.Omega = cfg.omega_body;
  out.references = cfg.references;
  out.bank = common_direction_bank(out.references, columns(cfg.directions));
  return out;
}

TrajectorySample sample(const ScenarioConfig& cfg, double t) {
  return sample(cfg, t, segment_of(cfg, t));
}

TrajectorySample sample(const ScenarioConfig& cfg, double t, int segment) {
  switch (cfg.id) {
    case ScenarioId::Sim1: return sim1_sample_in(cfg, t, segment);
    case ScenarioId::Sim2: return sim2_sample(cfg, t);
    case ScenarioId::Sim3: return sim3_sample(cfg, t);
    case ScenarioId::Custom: return custom_sample(cfg, t);
  }
  return {};
}

PitotGeometry pitot_geometry(double gamma_tilt, double phi_spread) {
  if (!open_interval(gamma_tilt, 0.0, kPi / 2) || !open_interval(phi_spread, 0.0, kPi / 2)) {
    throw DegenerateGeometry("pitot tilt and spread must lie in (0, π/2)");
  }
  const Vec3 boresight(std::cos(gamma_tilt), 0.0, std::sin(gamma_tilt));
  PitotGeometry g;
  g.a1 = std::cos(phi_spread) * boresight + std::sin(phi_spread) * Vec3::UnitY();
  g.a2 = std::cos(phi_spread) * boresight - std::sin(phi_spread) * Vec3::UnitY();
  const Vec3 n = g.a1.cross(g.a2);
  if (n.norm() < 1e-9) throw DegenerateGeometry("pitot directions are collinear");
  g.a_bar = n.normalized();
  return g;
}

double pitot_epsilon_bound(double gamma_tilt, double alpha_max, double beta_max) {
  const double c = std::cos(beta_max) * std::sin(gamma_tilt - alpha_max);
  return std::sqrt(1.0 - c * c);
}

SensorBank example1_bank(double gamma_dip, const Vec3& v_inertial, double g0) {
  if (!open_interval(gamma_dip, 0.0, kPi / 2)) {
    throw InvalidBank("dip angle must lie in (0, π/2)");
  }
  return common_direction_bank({gravity_vector(g0), magnetic_field(gamma_dip), v_inertial},
                               columns({Vec3::UnitX()}));
}

std::optional<double> certificate_epsilon(const ScenarioConfig& cfg) {
  if (cfg.epsilon_bound) return cfg.epsilon_bound;
  switch (cfg.id) {
    case ScenarioId::Sim2: return std::abs(std::sin(cfg.psi0));
    case ScenarioId::Sim3: return pitot_epsilon_bound(cfg.gamma_tilt, cfg.alpha_max, cfg.beta_max);
    default: return std::nullopt;
  }
}

namespace {

VariantBank vector_bank(const std::vector<Vec3>& refs) {
  VariantBank vb;
  std::vector<SensorChannel> channels;
  channels.reserve(refs.size());
  vb.reference_index.reserve(refs.size());
  vb.reference_scale.reserve(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    const double n = refs[i].norm();
    if (n == 0.0) throw IncompatibleVariant("vector baseline needs non-zero references");
    channels.emplace_back(refs[i] / n, DirectionMatrix(Mat3::Identity()));
    vb.reference_index.push_back(static_cast<int>(i));
    vb.reference_scale.push_back(1.0 / n);
  }
  vb.bank = SensorBank(std::move(channels));
  return vb;
}

VariantBank scalar_bank(const std::vector<Vec3>& refs, const DirectionMatrix& lambda) {
  VariantBank vb;
  vb.bank = common_direction_bank(refs, lambda);
  vb.reference_index.resize(refs.size());
  std::iota(vb.reference_index.begin(), vb.reference_index.end(), 0);
  vb.reference_scale.assign(refs.size(), 1.0);
  return vb;
}

[[noreturn]] void incompatible(const ScenarioConfig& cfg, const Variant& v) {
  throw IncompatibleVariant("variant " + v.name() + " is not available for scenario " +
                            to_string(cfg.id));
}

}  // namespace

VariantBank variant_bank(const ScenarioConfig& cfg, const Variant& variant,
                         const std::vector<Vec3>& refs) {
  const bool vec = variant.kind == Variant::Kind::VectorBaseline;
  switch (cfg.id) {
    case ScenarioId::Sim1: {
      // The full-vector filter reads accelerometer and magnetometer only.
      if (vec) return vector_bank({refs[0], refs[1]});
      if (variant.scalars == 3) return scalar_bank(refs, columns({Vec3::UnitX()}));
      if (variant.scalars == 6) return scalar_bank(refs, columns({Vec3::UnitX(), Vec3::UnitZ()}));
      break;
    }
    case ScenarioId::Sim2: {
      if (vec) return vector_bank(refs);
      if (variant.scalars == 2) return scalar_bank(refs, columns({Vec3::UnitX()}));
      break;
    }
    case ScenarioId::Sim3: {
      if (vec) return vector_bank(refs);
      if (variant.scalars == 2) {
        const PitotGeometry g = pitot_geometry(cfg.gamma_tilt, cfg.phi_spread);
        return scalar_bank(refs, columns({g.a1, g.a2}));
      }
      break;
    }
    case ScenarioId::Custom: {
      if (vec) return vector_bank(refs);
      if (variant.scalars == static_cast<int>(refs.size() * cfg.directions.size())) {
        return scalar_bank(refs, columns(cfg.directions));
      }
      break;
    }
  }
  incompatible(cfg, variant);
}

double variant_gain(const ScenarioConfig& cfg, const Variant& variant) {
  return variant.kind == Variant::Kind::VectorBaseline ? cfg.k_vector : cfg.k_scalar;
}

}  // namespace scalarcf
