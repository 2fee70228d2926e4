#include "scalarcf/cli.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "scalarcf/acceptance.hpp"
#include "scalarcf/analysis.hpp"
#include "scalarcf/config.hpp"
#include "scalarcf/engine.hpp"
#include "scalarcf/errors.hpp"
#include "scalarcf/output.hpp"

namespace scalarcf {

namespace {

// Final θ̃ a run must reach to count as converged.
constexpr double kConvergedDeg = 2.0;

struct RunOptions {
  std::string scenario;
  std::string config;
  std::string out_dir = "out";
  std::vector<std::string> variants;
  std::optional<double> dt;
  std::optional<std::uint64_t> seed;
};

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

int do_run(const RunOptions& o, std::ostream& out) {
  if (o.scenario.empty() && o.config.empty()) {
    throw ConfigError("run needs --scenario or --config", 0, "scenario");
  }
  std::optional<ScenarioId> id;
  if (!o.scenario.empty()) id = parse_scenario_id(o.scenario);
  ScenarioConfig cfg = o.config.empty() ? default_config(*id) : load_config(o.config, id);
  if (o.dt) cfg.dt = *o.dt;
  if (o.seed) cfg.seed = *o.seed;
  cfg.validate();

  std::vector<Variant> variants;
  for (const auto& v : o.variants) variants.push_back(Variant::parse(v));
  if (variants.empty()) variants = default_variants(cfg.id);

  const auto start = std::chrono::steady_clock::now();
  const std::vector<RunRecord> records = run(cfg, variants);
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();

  const std::filesystem::path dir(o.out_dir);
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create '" + dir.string() + "': " + ec.message());

  const std::string name = to_string(cfg.id);
  RunManifest manifest;
  manifest.scenario = name;
  manifest.config_hash = fnv1a(serialize(cfg));
  manifest.seed = cfg.seed;
  manifest.wall_seconds = seconds;
  bool ok = true;
  for (const auto& rec : records) {
    const std::string vname = rec.variant.name();
    manifest.variants.push_back(vname);
    const auto path = dir / (name + "_" + vname + ".csv");
    emit_csv(rec, path);

    const double final_deg = rec.rows.back().theta_tilde_deg;
    const bool converged = final_deg < kConvergedDeg;
    manifest.verdicts.emplace_back(vname + ":converged", converged);
    ok = ok && converged;
    std::string line = vname + " (" + to_string(rec.regime) + ", k=" + fixed(rec.gain, 3) +
                       "): theta " + fixed(rec.rows.front().theta_tilde_deg, 3) + " -> " +
                       fixed(final_deg, 3) + " deg";
    if (rec.theta_star) {
      bool held = true;
      for (std::size_t i = 1; i < rec.rows.size(); ++i) {
        if (rec.rows[i - 1].inside_basin && !rec.rows[i].inside_basin) held = false;
      }
      manifest.verdicts.emplace_back(vname + ":basin-held", held);
      ok = ok && held;
      line += ", theta* " + fixed(rad2deg(*rec.theta_star), 3) + " deg, basin " +
              (held ? "held" : "left");
    }
    out << line << "  [" << path.string() << "]\n";
  }
  emit_chart(records, dir / (name + ".svg"), name);
  write_manifest(manifest, dir / "manifest.json");
  out << "wrote " << records.size() << " CSV files, " << name << ".svg and manifest.json to "
      << dir.string() << " (" << fixed(seconds, 2) << " s)\n";
  return ok ? 0 : 1;
}

int do_check(std::ostream& out) {
  bool ok = true;
  run_acceptance([&](const CriterionResult& r) {
    out << format_result(r) << std::endl;
    ok = ok && r.passed;
  });
  out << (ok ? "all criteria passed" : "some criteria failed") << "\n";
  return ok ? 0 : 1;
}

}  // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Attitude complementary filter with scalar measurements"};
  app.name("scalarcf");
  app.require_subcommand(1);

  RunOptions ro;
  auto* run_cmd = app.add_subcommand("run", "simulate a scenario and write CSV, SVG and manifest");
  run_cmd->add_option("--scenario", ro.scenario, "sim1, sim2, sim3 or custom");
  run_cmd->add_option("--config", ro.config, "scenario config file");
  run_cmd->add_option("--out", ro.out_dir, "output directory")->capture_default_str();
  run_cmd->add_option("--variants", ro.variants, "scalar-<m> and/or vector-baseline")
      ->delimiter(',');
  run_cmd->add_option("--dt", ro.dt, "step size (s)");
  run_cmd->add_option("--seed", ro.seed, "noise seed");

  auto* check_cmd = app.add_subcommand("check", "run the acceptance suite");

  double epsilon = 0.0;
  auto* theta_cmd = app.add_subcommand("theta-star", "largest certified basin angle for epsilon");
  theta_cmd->add_option("--epsilon", epsilon, "mismatch bound in [0, 1)")->required();

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return 2;
  }

  try {
    if (*run_cmd) return do_run(ro, out);
    if (*check_cmd) return do_check(out);
    if (*theta_cmd) {
      const double theta = solve_theta_star(epsilon);
      out << "theta* = " << fixed(rad2deg(theta), 4) << " deg (" << fixed(theta, 6)
          << " rad) for epsilon = " << epsilon << "\n";
      return 0;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const IncompatibleVariant& e) {
    err << "config error: " << e.what() << "\n";
    return 2;
  } catch (const NoSolution& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return 2;
  } catch (const NonFiniteState& e) {
    err << "run aborted: " << e.what() << "\n";
    return 1;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

int cli_main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return cli_main(args, std::cout, std::cerr);
}

}  // namespace scalarcf
