#pragma once

#include <optional>
#include <string>
#include <vector>

#include "scalarcf/scenarios.hpp"

namespace scalarcf {

/// Which stability argument applies to a variant's sensor layout.
enum class Regime {
  Theorem1,        ///< ≥3 references with S ≻ 0 and a common Λ
  Lemma1,          ///< two references along one body direction
  Lemma2,          ///< one reference along two body directions
  VectorBaseline,  ///< full-vector classical filter
  Generic,
};

std::string to_string(Regime regime);

/// Classifies a bank by its structure (references, directions, Gram rank).
Regime classify_regime(const SensorBank& bank);

struct RunRow {
  double t = 0.0;
  double theta_tilde_deg = 0.0;
  double V = 0.0;
  double mu_hat = 0.0;
  double epsilon_value = 0.0;  ///< NaN outside the two-scalar regimes
  double margin = 0.0;         ///< NaN without a certificate
  bool inside_basin = false;
  double V_dot_numeric = 0.0;  ///< central difference of the logged V
  double V0 = 0.0;
  double V_E = 0.0;
  double yaw_deg = 0.0;
  double pitch_deg = 0.0;
  double roll_deg = 0.0;

  // Not part of the CSV.
  double V_dot_closed = 0.0;  ///< −tr([Δ]× R̃)
  double bound_rhs = 0.0;
  double orthonormality_error = 0.0;
};

struct RunRecord {
  ScenarioId scenario = ScenarioId::Sim1;
  Variant variant;
  Regime regime = Regime::Generic;
  double gain = 0.0;
  double dt = 0.0;
  /// Certified basin angle and ε for the two-scalar regimes.
  std::optional<double> theta_star;
  std::optional<double> epsilon_bound;
  std::vector<RunRow> rows;
};

/// Integrates the truth and every variant in lockstep over the configured
/// horizon and logs one row per grid time t = i·dt, i = 0 … ⌊duration/dt⌋.
///
/// Scenario inputs are sampled at the RK4 stage times; steps that contain
/// a breakpoint of a piecewise trajectory are split there. Optional noise
/// is drawn once per step from a 64-bit seeded generator in the body frame
/// of each reference vector and shared by all variants.
///
/// Throws IncompatibleVariant, ConfigError (invalid config) and
/// NonFiniteState (carrying the step index).
std::vector<RunRecord> run(const ScenarioConfig& cfg, const std::vector<Variant>& variants);

/// Fills V_dot_numeric from the V column (central differences, second
/// order one-sided at the ends).
void differentiate_potential(std::vector<RunRow>& rows, double dt);

}  // namespace scalarcf
