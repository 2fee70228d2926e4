#include "scalarcf/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <vector>

#include "scalarcf/errors.hpp"

namespace scalarcf {

namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

struct Line {
  int number;
  std::string key;
  std::string_view value;
};

[[noreturn]] void fail(const Line& l, const std::string& what) {
  throw ConfigError("field '" + l.key + "': " + what, l.number, l.key);
}

double number(const Line& l, std::string_view s) {
  s = trim(s);
  if (!s.empty() && s.front() == '+') s.remove_prefix(1);
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail(l, "expected a number, got '" + std::string(s) + "'");
  }
  if (!std::isfinite(v)) fail(l, "must be finite");
  return v;
}

using Convert = double (*)(double);

double as_is(double x) { return x; }

// Splits off a trailing `deg` or `rad` unit and returns the converter.
Convert unit(const Line& l, std::string_view& s, bool angular) {
  s = trim(s);
  const auto ends_with = [&](std::string_view suffix) {
    return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
  };
  const bool deg = ends_with("deg");
  if (!deg && !ends_with("rad")) return as_is;
  if (!angular) fail(l, "unit suffix not allowed on a non-angular field");
  s = trim(s.substr(0, s.size() - 3));
  return deg ? deg2rad : as_is;
}

double real(const Line& l, bool angular) {
  std::string_view s = l.value;
  const auto convert = unit(l, s, angular);
  return convert(number(l, s));
}

std::vector<double> tuple(const Line& l, std::string_view s, std::string_view head,
                          std::size_t n) {
  s = trim(s);
  if (s.substr(0, head.size()) != head) fail(l, "expected " + std::string(head) + "...)");
  s.remove_prefix(head.size());
  if (s.empty() || s.back() != ')') fail(l, "missing ')'");
  s.remove_suffix(1);
  const auto parts = split(s, ',');
  if (parts.size() != n) {
    fail(l, "expected " + std::to_string(n) + " components, got " + std::to_string(parts.size()));
  }
  std::vector<double> v;
  for (auto p : parts) v.push_back(number(l, p));
  return v;
}

Vec3 vec3(const Line& l, std::string_view s) {
  const auto v = tuple(l, s, "(", 3);
  return {v[0], v[1], v[2]};
}

std::vector<Vec3> vec3_list(const Line& l) {
  std::vector<Vec3> out;
  for (auto item : split(l.value, ';')) {
    if (item.empty()) fail(l, "empty vector in list");
    out.push_back(vec3(l, item));
  }
  return out;
}

Rotation rotation(const Line& l) {
  std::string_view s = trim(l.value);
  if (s == "identity") return Rotation::identity();
  if (s.substr(0, 4) == "ypr(") {
    const auto convert = unit(l, s, true);
    const auto v = tuple(l, s, "ypr(", 3);
    return euler_zyx(convert(v[0]), convert(v[1]), convert(v[2]));
  }
  if (s.substr(0, 7) == "matrix(") {
    const auto v = tuple(l, s, "matrix(", 9);
    Mat3 m;
    m << v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8];
    try {
      return Rotation::from_matrix(m);
    } catch (const InvalidRotation& e) {
      fail(l, e.what());
    }
  }
  fail(l, "expected identity, ypr(yaw, pitch, roll) [deg|rad] or matrix(9 entries)");
}

std::uint64_t integer(const Line& l) {
  const std::string_view s = trim(l.value);
  std::uint64_t v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size() || s.empty()) {
    fail(l, "expected a non-negative integer, got '" + std::string(s) + "'");
  }
  return v;
}

using Setter = std::function<void(ScenarioConfig&, const Line&)>;

const std::map<std::string, Setter, std::less<>>& setters() {
  auto plain = [](double ScenarioConfig::*f) -> Setter {
    return [f](ScenarioConfig& c, const Line& l) { c.*f = real(l, false); };
  };
  auto angle = [](double ScenarioConfig::*f) -> Setter {
    return [f](ScenarioConfig& c, const Line& l) { c.*f = real(l, true); };
  };
  static const std::map<std::string, Setter, std::less<>> table = {
      {"duration", plain(&ScenarioConfig::duration)},
      {"dt", plain(&ScenarioConfig::dt)},
      {"k_scalar", plain(&ScenarioConfig::k_scalar)},
      {"k_vector", plain(&ScenarioConfig::k_vector)},
      {"R0_true",
       [](ScenarioConfig& c, const Line& l) {
         if (c.id != ScenarioId::Custom) fail(l, "only settable for the custom scenario");
         c.R0_true = rotation(l);
       }},
      {"R0_hat", [](ScenarioConfig& c, const Line& l) { c.R0_hat = rotation(l); }},
      {"psi0", angle(&ScenarioConfig::psi0)},
      {"phi0", angle(&ScenarioConfig::phi0)},
      {"omega", plain(&ScenarioConfig::omega)},
      {"omega_alpha", plain(&ScenarioConfig::omega_alpha)},
      {"omega_beta", plain(&ScenarioConfig::omega_beta)},
      {"alpha_max", angle(&ScenarioConfig::alpha_max)},
      {"beta_max", angle(&ScenarioConfig::beta_max)},
      {"gamma_dip", angle(&ScenarioConfig::gamma_dip)},
      {"gamma_tilt", angle(&ScenarioConfig::gamma_tilt)},
      {"phi_spread", angle(&ScenarioConfig::phi_spread)},
      {"V_speed", plain(&ScenarioConfig::V_speed)},
      {"g0", plain(&ScenarioConfig::g0)},
      {"hold_start", plain(&ScenarioConfig::hold_start)},
      {"hold_end", plain(&ScenarioConfig::hold_end)},
      {"omega_body", [](ScenarioConfig& c, const Line& l) { c.omega_body = vec3(l, l.value); }},
      {"references", [](ScenarioConfig& c, const Line& l) { c.references = vec3_list(l); }},
      {"directions", [](ScenarioConfig& c, const Line& l) { c.directions = vec3_list(l); }},
      {"noise_std", plain(&ScenarioConfig::noise_std)},
      {"seed", [](ScenarioConfig& c, const Line& l) { c.seed = integer(l); }},
      {"pe_window", plain(&ScenarioConfig::pe_window)},
      {"epsilon_bound", [](ScenarioConfig& c, const Line& l) { c.epsilon_bound = real(l, false); }},
  };
  return table;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text, std::optional<ScenarioId> scenario) {
  std::vector<Line> lines;
  std::map<std::string, int, std::less<>> seen;
  std::optional<ScenarioId> declared;

  int number = 0;
  for (auto raw : split(text, '\n')) {
    ++number;
    const auto hash = raw.find('#');
    const std::string_view body = trim(raw.substr(0, hash));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("expected 'key = value', got '" + std::string(body) + "'", number, "");
    }
    Line l{number, std::string(trim(body.substr(0, eq))), trim(body.substr(eq + 1))};
    if (l.key.empty()) throw ConfigError("missing key before '='", number, "");
    if (l.value.empty()) fail(l, "missing value");
    if (const auto it = seen.find(l.key); it != seen.end()) {
      fail(l, "duplicate key (first set on line " + std::to_string(it->second) + ")");
    }
    seen.emplace(l.key, number);

    if (l.key == "scenario") {
      try {
        declared = parse_scenario_id(std::string(l.value));
      } catch (const ConfigError& e) {
        throw ConfigError(e.what(), number, "scenario");
      }
      continue;
    }
    if (setters().find(l.key) == setters().end()) fail(l, "unknown key");
    lines.push_back(l);
  }

  if (declared && scenario && *declared != *scenario) {
    throw ConfigError("config declares scenario '" + to_string(*declared) +
                          "' but '" + to_string(*scenario) + "' was requested",
                      seen.at("scenario"), "scenario");
  }
  const ScenarioId id = declared ? *declared : scenario.value_or(ScenarioId::Sim1);
  if (!declared && !scenario) throw ConfigError("no scenario given", 0, "scenario");

  ScenarioConfig cfg = default_config(id);
  for (const auto& l : lines) setters().find(l.key)->second(cfg, l);

  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    const auto it = seen.find(e.field());
    if (it == seen.end()) throw;
    throw ConfigError(e.what(), it->second, e.field());
  }
  if (id != ScenarioId::Custom) cfg.R0_true = sample(cfg, 0.0).R;
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path, std::optional<ScenarioId> scenario) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read config '" + path.string() + "'");
  std::ostringstream text;
  text << in.rdbuf();
  try {
    return parse_config(text.str(), scenario);
  } catch (const ConfigError& e) {
    throw ConfigError(path.string() + ": " + e.what(), 0, e.field());
  }
}

namespace {

std::string fmt(double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  return std::string(buf, ptr);
}

std::string fmt(const Vec3& v) { return "(" + fmt(v[0]) + ", " + fmt(v[1]) + ", " + fmt(v[2]) + ")"; }

std::string fmt(const std::vector<Vec3>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) out += (i ? "; " : "") + fmt(vs[i]);
  return out;
}

std::string fmt(const Rotation& r) {
  std::string out = "matrix(";
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) out += (i + j ? ", " : "") + fmt(r.matrix()(i, j));
  }
  return out + ")";
}

}  // namespace

std::string serialize(const ScenarioConfig& c) {
  std::ostringstream os;
  os << "scenario = " << to_string(c.id) << "\n"
     << "duration = " << fmt(c.duration) << "\n"
     << "dt = " << fmt(c.dt) << "\n"
     << "k_scalar = " << fmt(c.k_scalar) << "\n"
     << "k_vector = " << fmt(c.k_vector) << "\n";
  if (c.id == ScenarioId::Custom) os << "R0_true = " << fmt(c.R0_true) << "\n";
  os << "R0_hat = " << fmt(c.R0_hat) << "\n"
     << "psi0 = " << fmt(c.psi0) << "\n"
     << "phi0 = " << fmt(c.phi0) << "\n"
     << "omega = " << fmt(c.omega) << "\n"
     << "omega_alpha = " << fmt(c.omega_alpha) << "\n"
     << "omega_beta = " << fmt(c.omega_beta) << "\n"
     << "alpha_max = " << fmt(c.alpha_max) << "\n"
     << "beta_max = " << fmt(c.beta_max) << "\n"
     << "gamma_dip = " << fmt(c.gamma_dip) << "\n"
     << "gamma_tilt = " << fmt(c.gamma_tilt) << "\n"
     << "phi_spread = " << fmt(c.phi_spread) << "\n"
     << "V_speed = " << fmt(c.V_speed) << "\n"
     << "g0 = " << fmt(c.g0) << "\n"
     << "hold_start = " << fmt(c.hold_start) << "\n"
     << "hold_end = " << fmt(c.hold_end) << "\n"
     << "omega_body = " << fmt(c.omega_body) << "\n";
  if (!c.references.empty()) os << "references = " << fmt(c.references) << "\n";
  if (!c.directions.empty()) os << "directions = " << fmt(c.directions) << "\n";
  os << "noise_std = " << fmt(c.noise_std) << "\n"
     << "seed = " << c.seed << "\n"
     << "pe_window = " << fmt(c.pe_window) << "\n";
  if (c.epsilon_bound) os << "epsilon_bound = " << fmt(*c.epsilon_bound) << "\n";
  return os.str();
}

std::uint64_t fnv1a(std::string_view bytes) {
  std::uint64_t h = 14695981039346656037ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace scalarcf
