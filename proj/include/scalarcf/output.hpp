#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scalarcf/engine.hpp"

namespace scalarcf {

inline constexpr std::string_view kLibraryVersion = "0.1.0";

inline constexpr std::array<std::string_view, 13> kCsvColumns = {
    "t",           "theta_tilde_deg", "V",  "mu_hat", "epsilon_value", "margin",  "inside_basin",
    "V_dot_numeric", "V0",           "V_E", "yaw_deg", "pitch_deg",    "roll_deg"};

/// Header plus one line per row; reals use 17 significant digits so a
/// parse reproduces them exactly. NaN is written as `nan`.
void write_csv(const std::vector<RunRow>& rows, std::ostream& out);
/// Throws IoError if the file cannot be written.
void emit_csv(const RunRecord& record, const std::filesystem::path& path);

/// Reads the CSV columns back; other RunRow fields stay default.
/// Throws IoError on a malformed header or row.
std::vector<RunRow> parse_csv(std::istream& in);
std::vector<RunRow> read_csv(const std::filesystem::path& path);

/// θ̃ (deg) against t (s), one polyline per record, with axes, ticks and a
/// legend. Polylines are decimated to at most 2000 points. Throws EmptyInput
/// for an empty list or a list without rows.
std::string render_chart(const std::vector<RunRecord>& records, const std::string& title);
void emit_chart(const std::vector<RunRecord>& records, const std::filesystem::path& path,
                const std::string& title = "");

struct RunManifest {
  std::string scenario;
  std::vector<std::string> variants;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  std::string version{kLibraryVersion};
  double wall_seconds = 0.0;
  std::vector<std::pair<std::string, bool>> verdicts;
};

std::string to_json(const RunManifest& manifest);
void write_manifest(const RunManifest& manifest, const std::filesystem::path& path);

}  // namespace scalarcf
