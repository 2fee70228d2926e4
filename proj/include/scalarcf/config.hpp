#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "scalarcf/scenarios.hpp"

namespace scalarcf {

// Scenario config files are flat `key = value` lists, one per line, with
// `#` comments. Keys are the ScenarioConfig field names plus `scenario`.
//
//   scenario   = sim3
//   duration   = 60
//   alpha_max  = 20 deg           # reals: optional deg|rad suffix
//   omega_body = (0.1, 0.2, 0.3)  # vectors
//   references = (1,0,0); (0,1,0) # vector lists
//   R0_hat     = ypr(15, 10, 7.5) deg
//   R0_true    = matrix(1,0,0, 0,1,0, 0,0,1)
//   seed       = 42
//
// Unset keys keep the scenario's defaults. Angles without a
// suffix are radians.

/// Parses a config. `scenario` selects the defaults when the text has no
/// `scenario` key; if both are given they must agree. Throws ConfigError
/// with the offending line and field.
ScenarioConfig parse_config(std::string_view text,
                            std::optional<ScenarioId> scenario = std::nullopt);

/// Reads and parses a file. Throws IoError if it cannot be read.
ScenarioConfig load_config(const std::filesystem::path& path,
                           std::optional<ScenarioId> scenario = std::nullopt);

/// Canonical text form; parse_config(serialize(c)) reproduces c exactly.
std::string serialize(const ScenarioConfig& cfg);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view bytes);

}  // namespace scalarcf
