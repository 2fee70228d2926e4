#include "scalarcf/output.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "scalarcf/errors.hpp"

namespace scalarcf {

namespace {

void put(std::ostream& out, double v) {
  char buf[32];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
  out.write(buf, ptr - buf);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  return out;
}

void close_out(std::ofstream& out, const std::filesystem::path& path) {
  out.flush();
  if (!out) throw IoError("write to '" + path.string() + "' failed");
}

}  // namespace

void write_csv(const std::vector<RunRow>& rows, std::ostream& out) {
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) out << (i ? "," : "") << kCsvColumns[i];
  out << '\n';
  for (const auto& r : rows) {
    const double vals[] = {r.t,  r.theta_tilde_deg, r.V, r.mu_hat, r.epsilon_value, r.margin};
    for (std::size_t i = 0; i < std::size(vals); ++i) {
      if (i) out << ',';
      put(out, vals[i]);
    }
    out << ',' << (r.inside_basin ? 1 : 0);
    for (double v : {r.V_dot_numeric, r.V0, r.V_E, r.yaw_deg, r.pitch_deg, r.roll_deg}) {
      out << ',';
      put(out, v);
    }
    out << '\n';
  }
}

void emit_csv(const RunRecord& record, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_csv(record.rows, out);
  close_out(out, path);
}

std::vector<RunRow> parse_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw IoError("empty CSV (missing header)");
  std::string header;
  for (std::size_t i = 0; i < kCsvColumns.size(); ++i) {
    header += (i ? "," : "") + std::string(kCsvColumns[i]);
  }
  if (line != header) throw IoError("unexpected CSV header '" + line + "'");

  std::vector<RunRow> rows;
  long number = 1;
  while (std::getline(in, line)) {
    ++number;
    if (line.empty()) continue;
    double v[13];
    const char* p = line.data();
    const char* end = p + line.size();
    for (int i = 0; i < 13; ++i) {
      const auto [ptr, ec] = std::from_chars(p, end, v[i]);
      const bool last = i == 12;
      if (ec != std::errc() || (last ? ptr != end : (ptr == end || *ptr != ','))) {
        throw IoError("malformed CSV row " + std::to_string(number));
      }
      p = last ? ptr : ptr + 1;
    }
    RunRow r;
    r.t = v[0];
    r.theta_tilde_deg = v[1];
    r.V = v[2];
    r.mu_hat = v[3];
    r.epsilon_value = v[4];
    r.margin = v[5];
    r.inside_basin = v[6] != 0.0;
    r.V_dot_numeric = v[7];
    r.V0 = v[8];
    r.V_E = v[9];
    r.yaw_deg = v[10];
    r.pitch_deg = v[11];
    r.roll_deg = v[12];
    rows.push_back(r);
  }
  return rows;
}

std::vector<RunRow> read_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read '" + path.string() + "'");
  return parse_csv(in);
}

// ---------------------------------------------------------------------------
// SVG chart

namespace {

constexpr double kWidth = 800.0;
constexpr double kHeight = 480.0;
constexpr double kLeft = 70.0;
constexpr double kRight = 180.0;
constexpr double kTop = 40.0;
constexpr double kBottom = 50.0;
constexpr std::size_t kMaxPoints = 2000;

constexpr const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e",
                                    "#8c564b"};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%g", std::abs(v) < 1e-12 ? 0.0 : v);
  return buf;
}

// 1, 2 or 5 times a power of ten giving at most ~`target` intervals.
double nice_step(double range, int target) {
  const double raw = range / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  for (double m : {1.0, 2.0, 5.0, 10.0}) {
    if (m * mag >= raw) return m * mag;
  }
  return 10.0 * mag;
}

std::string escape(const std::string& s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

}  // namespace

std::string render_chart(const std::vector<RunRecord>& records, const std::string& title) {
  if (records.empty()) throw EmptyInput("chart needs at least one record");
  double t_max = 0.0;
  double y_max = 0.0;
  bool any = false;
  for (const auto& r : records) {
    for (const auto& row : r.rows) {
      any = true;
      t_max = std::max(t_max, row.t);
      if (std::isfinite(row.theta_tilde_deg)) y_max = std::max(y_max, row.theta_tilde_deg);
    }
  }
  if (!any) throw EmptyInput("chart records contain no rows");
  if (t_max <= 0.0) t_max = 1.0;
  if (y_max <= 0.0) y_max = 1.0;

  const double x_step = nice_step(t_max, 8);
  const double y_step = nice_step(y_max, 6);
  const double x_top = std::ceil(t_max / x_step - 1e-9) * x_step;
  const double y_top = std::ceil(y_max / y_step - 1e-9) * y_step;
  const double pw = kWidth - kLeft - kRight;
  const double ph = kHeight - kTop - kBottom;
  auto px = [&](double t) { return kLeft + pw * t / x_top; };
  auto py = [&](double y) { return kTop + ph * (1.0 - y / y_top); };

  std::ostringstream s;
  s << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kWidth << "\" height=\"" << kHeight
    << "\" viewBox=\"0 0 " << kWidth << ' ' << kHeight << "\" font-family=\"sans-serif\" "
    << "font-size=\"12\">\n";
  s << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  if (!title.empty()) {
    s << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << escape(title) << "</text>\n";
  }

  // Grid and ticks.
  s << "<g stroke=\"#dddddd\" stroke-width=\"1\">\n";
  for (double x = 0.0; x <= x_top + 1e-9 * x_top; x += x_step) {
    s << "<line x1=\"" << num(px(x)) << "\" y1=\"" << num(kTop) << "\" x2=\"" << num(px(x))
      << "\" y2=\"" << num(kTop + ph) << "\"/>\n";
  }
  for (double y = 0.0; y <= y_top + 1e-9 * y_top; y += y_step) {
    s << "<line x1=\"" << num(kLeft) << "\" y1=\"" << num(py(y)) << "\" x2=\"" << num(kLeft + pw)
      << "\" y2=\"" << num(py(y)) << "\"/>\n";
  }
  s << "</g>\n<g text-anchor=\"middle\">\n";
  for (double x = 0.0; x <= x_top + 1e-9 * x_top; x += x_step) {
    s << "<text x=\"" << num(px(x)) << "\" y=\"" << num(kTop + ph + 18) << "\">" << tick_label(x)
      << "</text>\n";
  }
  s << "</g>\n<g text-anchor=\"end\">\n";
  for (double y = 0.0; y <= y_top + 1e-9 * y_top; y += y_step) {
    s << "<text x=\"" << num(kLeft - 8) << "\" y=\"" << num(py(y) + 4) << "\">" << tick_label(y)
      << "</text>\n";
  }
  s << "</g>\n";
  s << "<path d=\"M" << num(kLeft) << ' ' << num(kTop) << " V" << num(kTop + ph) << " H"
    << num(kLeft + pw) << "\" fill=\"none\" stroke=\"black\"/>\n";
  s << "<text x=\"" << num(kLeft + pw / 2) << "\" y=\"" << num(kHeight - 10)
    << "\" text-anchor=\"middle\">t (s)</text>\n";
  s << "<text transform=\"translate(18 " << num(kTop + ph / 2)
    << ") rotate(-90)\" text-anchor=\"middle\">attitude error (deg)</text>\n";

  for (std::size_t i = 0; i < records.size(); ++i) {
    const auto& rows = records[i].rows;
    const char* color = kPalette[i % std::size(kPalette)];
    const std::size_t stride = std::max<std::size_t>(1, (rows.size() + kMaxPoints - 1) / kMaxPoints);
    s << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\" points=\"";
    bool first = true;
    for (std::size_t j = 0; j < rows.size(); j += stride) {
      s << (first ? "" : " ") << num(px(rows[j].t)) << ',' << num(py(rows[j].theta_tilde_deg));
      first = false;
    }
    if (!rows.empty() && (rows.size() - 1) % stride != 0) {
      s << ' ' << num(px(rows.back().t)) << ',' << num(py(rows.back().theta_tilde_deg));
    }
    s << "\"/>\n";

    const double ly = kTop + 10 + 20.0 * static_cast<double>(i);
    const double lx = kLeft + pw + 15;
    s << "<line x1=\"" << num(lx) << "\" y1=\"" << num(ly) << "\" x2=\"" << num(lx + 25)
      << "\" y2=\"" << num(ly) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
    s << "<text x=\"" << num(lx + 32) << "\" y=\"" << num(ly + 4) << "\">"
      << escape(records[i].variant.name()) << "</text>\n";
  }
  s << "</svg>\n";
  return s.str();
}

void emit_chart(const std::vector<RunRecord>& records, const std::filesystem::path& path,
                const std::string& title) {
  const std::string svg = render_chart(records, title);
  auto out = open_out(path);
  out << svg;
  close_out(out, path);
}

// ---------------------------------------------------------------------------
// Manifest

std::string to_json(const RunManifest& m) {
  char hash[17];
  std::snprintf(hash, sizeof hash, "%016llx", static_cast<unsigned long long>(m.config_hash));
  nlohmann::ordered_json j;
  j["scenario"] = m.scenario;
  j["variants"] = m.variants;
  j["config_hash"] = hash;
  j["seed"] = m.seed;
  j["version"] = m.version;
  j["wall_seconds"] = m.wall_seconds;
  auto& v = j["verdicts"] = nlohmann::ordered_json::object();
  for (const auto& [name, ok] : m.verdicts) v[name] = ok;
  return j.dump(2) + "\n";
}

void write_manifest(const RunManifest& manifest, const std::filesystem::path& path) {
  auto out = open_out(path);
  out << to_json(manifest);
  close_out(out, path);
}

}  // namespace scalarcf
