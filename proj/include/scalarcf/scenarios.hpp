#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scalarcf/measurement.hpp"
#include "scalarcf/so3.hpp"

namespace scalarcf {

enum class ScenarioId { Sim1, Sim2, Sim3, Custom };

std::string to_string(ScenarioId id);
/// Throws ConfigError for unknown names.
ScenarioId parse_scenario_id(const std::string& name);

/// Observer flavour run against a scenario. Scalar variants use the
/// generalized innovation on the scenario's scalar outputs; the vector
/// baseline runs the classical filter on unit-normalized full vectors.
struct Variant {
  enum class Kind { Scalar, VectorBaseline };
  Kind kind = Kind::Scalar;
  int scalars = 0;  ///< number of scalar outputs (Scalar kind only)

  static Variant scalar(int m) { return {Kind::Scalar, m}; }
  static Variant vector_baseline() { return {Kind::VectorBaseline, 0}; }

  /// "scalar-3", "scalar-6", "scalar-2", …, or "vector-baseline".
  std::string name() const;
  /// Throws IncompatibleVariant on malformed names.
  static Variant parse(const std::string& name);

  bool operator==(const Variant&) const = default;
};

struct ScenarioConfig {
  ScenarioId id = ScenarioId::Sim1;
  double duration = 100.0;  ///< s
  double dt = 1e-3;         ///< s
  double k_scalar = 0.5;
  double k_vector = 2.0;
  Rotation R0_true;  ///< derived from the trajectory except for custom runs
  Rotation R0_hat;

  // Trajectory parameters (radians, rad/s, m/s).
  double psi0 = 0.0;         ///< yaw oscillation amplitude
  double phi0 = 0.0;         ///< x-axis (pitch/roll) oscillation amplitude
  double omega = 0.0;        ///< trajectory rate
  double omega_alpha = 0.0;  ///< angle-of-attack rate
  double omega_beta = 0.0;   ///< sideslip rate
  double alpha_max = 0.0;
  double beta_max = 0.0;
  double gamma_dip = 0.0;   ///< magnetic dip angle
  double gamma_tilt = 0.0;  ///< pitot tilt
  double phi_spread = 0.0;  ///< pitot left/right spread
  double V_speed = 0.0;
  double g0 = 9.8;
  double hold_start = kPi;       ///< Sim 1: start of the Ω = 0 segment
  double hold_end = 4.0 * kPi;   ///< Sim 1: end of the Ω = 0 segment

  // Custom scenario: R(t) = R0_true·exp(Ω t), constant references and a
  // common set of body directions.
  Vec3 omega_body = Vec3::Zero();
  std::vector<Vec3> references;
  std::vector<Vec3> directions;

  double noise_std = 0.0;  ///< per scalar channel, units of the measured vector
  std::uint64_t seed = 0;
  double pe_window = 2.0;  ///< s
  /// Overrides the scenario's certified ε bound when set.
  std::optional<double> epsilon_bound;

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;
};

/// Reference parameters of the three simulations (custom: a slow
/// constant-rate rotation with three scalar measurements).
ScenarioConfig default_config(ScenarioId id);

std::vector<Variant> default_variants(ScenarioId id);

struct TrajectorySample {
  double t = 0.0;
  Rotation R;
  Vec3 Omega = Vec3::Zero();
  /// Inertial reference vectors b_i(t) in scenario order.
  std::vector<Vec3> references;
  /// The scenario's primary scalar bank at t.
  SensorBank bank;
};

/// Piecewise definition index containing t (Sim 1 has three segments).
int segment_of(const ScenarioConfig& cfg, double t);

/// Times where Ω is discontinuous; steps are split there.
std::vector<double> breakpoints(const ScenarioConfig& cfg);

TrajectorySample sim1_sample(const ScenarioConfig& cfg, double t);
TrajectorySample sim2_sample(const ScenarioConfig& cfg, double t);
TrajectorySample sim3_sample(const ScenarioConfig& cfg, double t);
TrajectorySample custom_sample(const ScenarioConfig& cfg, double t);

/// Dispatches on cfg.id. With a segment index, piecewise scenarios use
/// that segment's formulas (one-sided limits at breakpoints).
TrajectorySample sample(const ScenarioConfig& cfg, double t);
TrajectorySample sample(const ScenarioConfig& cfg, double t, int segment);

/// Sim 3 rate with sin(α_max cos ω_α t) in the third slot. It does not match
/// the attitude R = R_z(ωt − β)R_y(α); kept so a test pins the difference.
Vec3 sim3_omega_sin_variant(const ScenarioConfig& cfg, double t);

struct PitotGeometry {
  Vec3 a1;
  Vec3 a2;
  Vec3 a_bar;  ///< a₁×a₂/‖a₁×a₂‖
};

/// Two probes tilted by gamma_tilt toward body-down and spread by
/// ±phi_spread about e₂. Throws DegenerateGeometry if ‖a₁×a₂‖ < 1e-9 or the
/// angles leave (0, π/2).
PitotGeometry pitot_geometry(double gamma_tilt, double phi_spread);

/// Worst-case ε = √(1 − cos²β_max sin²(γ − α_max)) for the pitot pair.
double pitot_epsilon_bound(double gamma_tilt, double alpha_max, double beta_max);

Vec3 gravity_vector(double g0);
Vec3 magnetic_field(double gamma_dip);

/// Accelerometer, magnetometer and GPS velocity, each read along e₁.
SensorBank example1_bank(double gamma_dip, const Vec3& v_inertial, double g0 = 9.8);

/// Certified ε for the scenario's two-scalar configuration, if any.
std::optional<double> certificate_epsilon(const ScenarioConfig& cfg);

/// Sensor bank of one variant at a sample, with the index of the reference
/// vector behind each channel and the scale applied to it.
struct VariantBank {
  SensorBank bank;
  std::vector<int> reference_index;
  std::vector<double> reference_scale;
};

/// Throws IncompatibleVariant when the scenario cannot host the variant.
VariantBank variant_bank(const ScenarioConfig& cfg, const Variant& variant,
                         const std::vector<Vec3>& references);

/// Gain used for the variant (k_scalar or k_vector).
double variant_gain(const ScenarioConfig& cfg, const Variant& variant);

}  // namespace scalarcf
