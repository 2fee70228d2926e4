#include "scalarcf/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <limits>
#include <map>
#include <random>

#include "scalarcf/analysis.hpp"
#include "scalarcf/engine.hpp"
#include "scalarcf/observer.hpp"
#include "scalarcf/scenarios.hpp"

namespace scalarcf {

std::string format_result(const CriterionResult& r) {
  std::string line = r.passed ? "[PASS] " : "[FAIL] ";
  line += std::to_string(r.id) + " " + r.title;
  if (!r.detail.empty()) line += ": " + r.detail;
  return line;
}

namespace {

std::string printf_string(const char* fmt, ...) {
  char buf[512];
  va_list args;
  va_start(args, fmt);
  std::vsnprintf(buf, sizeof buf, fmt, args);
  va_end(args);
  return buf;
}

struct TimedRun {
  std::vector<RunRecord> records;
  double seconds = 0.0;
};

TimedRun timed_run(ScenarioId id, double dt) {
  ScenarioConfig cfg = default_config(id);
  cfg.dt = dt;
  const auto start = std::chrono::steady_clock::now();
  TimedRun out;
  out.records = run(cfg, default_variants(id));
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

const RunRecord& find(const TimedRun& r, const Variant& v) {
  for (const auto& rec : r.records) {
    if (rec.variant == v) return rec;
  }
  throw std::logic_error("variant missing from run: " + v.name());
}

// Row index of the first grid time ≥ t.
std::size_t row_at(const RunRecord& rec, double t) {
  return static_cast<std::size_t>(std::ceil(t / rec.dt - 1e-9));
}

Rotation random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  std::uniform_real_distribution<double> u(0.0, kPi);
  const Vec3 axis = Vec3(g(rng), g(rng), g(rng)).normalized();
  return exp_so3(u(rng) * axis);
}

Vec3 random_vector(std::mt19937_64& rng) {
  std::normal_distribution<double> g;
  return {g(rng), g(rng), g(rng)};
}

DirectionMatrix cols(std::initializer_list<Vec3> vs) {
  DirectionMatrix m(3, static_cast<Eigen::Index>(vs.size()));
  Eigen::Index j = 0;
  for (const auto& v : vs) m.col(j++) = v;
  return m;
}

// ---------------------------------------------------------------------------

CriterionResult c1_initial_error() {
  CriterionResult r{1, "initial-error", true, ""};
  const std::pair<ScenarioId, double> expected[] = {
      {ScenarioId::Sim1, 91.7}, {ScenarioId::Sim2, 70.0}, {ScenarioId::Sim3, 19.0}};
  for (const auto& [id, deg] : expected) {
    const ScenarioConfig cfg = default_config(id);
    const double got = rad2deg(error_metrics(sample(cfg, 0.0).R, cfg.R0_hat).theta_tilde);
    r.passed = r.passed && std::abs(got - deg) <= 0.5;
    r.detail += printf_string("%s%s %.3f deg (expect %.1f)", r.detail.empty() ? "" : ", ",
                              to_string(id).c_str(), got, deg);
  }
  return r;
}

CriterionResult c2_theta_star() {
  const double a = rad2deg(solve_theta_star(std::sin(deg2rad(15.0))));
  const double b = rad2deg(solve_theta_star(0.9237));
  const bool ok = std::abs(a - 71.4) <= 0.1 && std::abs(b - 20.23) <= 0.05;
  return {2, "theta-star", ok,
          printf_string("theta*(sin 15 deg) = %.4f deg, theta*(0.9237) = %.4f deg", a, b)};
}

CriterionResult c3_epsilon_bound() {
  const ScenarioConfig cfg = default_config(ScenarioId::Sim3);
  const double bound = pitot_epsilon_bound(cfg.gamma_tilt, cfg.alpha_max, cfg.beta_max);
  const double closed = std::sqrt(1.0 - std::pow(std::cos(deg2rad(25.0)) * std::sin(deg2rad(25.0)), 2));
  const PitotGeometry g = pitot_geometry(cfg.gamma_tilt, cfg.phi_spread);

  constexpr int n = 401;
  double worst = 0.0;
  for (int i = 0; i < n; ++i) {
    const double alpha = cfg.alpha_max * (2.0 * i / (n - 1) - 1.0);
    for (int j = 0; j < n; ++j) {
      const double beta = cfg.beta_max * (2.0 * j / (n - 1) - 1.0);
      const Rotation rot = euler_zyx(-beta, alpha, 0.0);
      worst = std::max(worst, epsilon_lemma2(g.a1, g.a2, rot, Vec3::UnitX()));
    }
  }
  const bool ok = std::abs(bound - 0.9237) <= 1e-4 && std::abs(bound - closed) <= 1e-12 &&
                  worst <= bound + 1e-6;
  return {3, "epsilon-bound", ok,
          printf_string("bound %.6f, sweep max %.6f over %dx%d (alpha, beta) grid", bound, worst,
                        n, n)};
}

CriterionResult c4_classical_reduction() {
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> gain(0.1, 5.0);
  double worst = 0.0;
  for (int i = 0; i < 1000; ++i) {
    const Mat3 basis = random_rotation(rng).matrix();
    std::vector<SensorChannel> ch;
    for (int c = 0; c < 3; ++c) ch.emplace_back(basis.col(c), DirectionMatrix(Mat3::Identity()));
    const SensorBank bank(ch);
    const Rotation truth = random_rotation(rng);
    const ObserverState st(random_rotation(rng), gain(rng));
    const Measurement y = measure(bank, truth);
    const Vec3 d = innovation(bank, st, y).delta - classical_innovation(bank, st, y);
    worst = std::max(worst, d.cwiseAbs().maxCoeff());
  }
  return {4, "classical-reduction", worst <= 1e-12,
          printf_string("max |generalized - classical| = %.3g over 1000 states", worst)};
}

// Closed-form innovations of the two minimal configurations.
Vec3 lemma1_closed_form(const Vec3& a, const Vec3& b1, const Vec3& b2, const Rotation& r,
                        const Rotation& r_hat, double k) {
  const Vec3 b_bar = b1.cross(b2).normalized();
  const Vec3 a_hat = a.normalized();
  const Vec3 rha = r_hat * a_hat;
  const Vec3 x = rha - r * a_hat;
  return k * (x - b_bar * b_bar.dot(x)).cross(rha);
}

Vec3 lemma2_closed_form(const Vec3& a1, const Vec3& a2, const Vec3& b, const Rotation& r,
                        const Rotation& r_hat, double k) {
  const Vec3 rab = r * a1.cross(a2).normalized();
  const Vec3 bh = b.normalized();
  const Mat3 rt = (r_hat * r.transpose()).matrix();
  const Vec3 w = rt.transpose() * bh - bh;
  return k * bh.cross(rt * (w - rab * rab.dot(w)));
}

CriterionResult c5_closed_forms() {
  std::mt19937_64 rng(5);
  std::uniform_real_distribution<double> gain(0.1, 5.0);
  double worst1 = 0.0;
  double worst2 = 0.0;
  int n1 = 0;
  int n2 = 0;
  while (n1 < 1000) {
    const Vec3 a = random_vector(rng);
    const Vec3 b1 = random_vector(rng);
    const Vec3 b2 = random_vector(rng);
    if (b1.cross(b2).norm() < 1e-3 * b1.norm() * b2.norm()) continue;
    const SensorBank bank({SensorChannel(b1, cols({a})), SensorChannel(b2, cols({a}))});
    const Rotation truth = random_rotation(rng);
    const ObserverState st(random_rotation(rng), gain(rng));
    const Vec3 generic = innovation(bank, st, measure(bank, truth)).delta;
    const Vec3 closed = lemma1_closed_form(a, b1, b2, truth, st.r_hat, st.k);
    worst1 = std::max(worst1, (generic - closed).cwiseAbs().maxCoeff());
    ++n1;
  }
  while (n2 < 1000) {
    const Vec3 a1 = random_vector(rng);
    const Vec3 a2 = random_vector(rng);
    const Vec3 b = random_vector(rng);
    if (a1.cross(a2).norm() < 1e-3 * a1.norm() * a2.norm()) continue;
    const SensorBank bank({SensorChannel(b, cols({a1, a2}))});
    const Rotation truth = random_rotation(rng);
    const ObserverState st(random_rotation(rng), gain(rng));
    const Vec3 generic = innovation(bank, st, measure(bank, truth)).delta;
    const Vec3 closed = lemma2_closed_form(a1, a2, b, truth, st.r_hat, st.k);
    worst2 = std::max(worst2, (generic - closed).cwiseAbs().maxCoeff());
    ++n2;
  }
  return {5, "closed-forms", worst1 <= 1e-12 && worst2 <= 1e-12,
          printf_string("max deviation lemma-1 %.3g, lemma-2 %.3g (1000 states each)", worst1,
                        worst2)};
}

// Central differences of V lose accuracy where V̈ jumps; skip the rows
// next to a breakpoint.
bool near_breakpoint(const ScenarioConfig& cfg, double t, double dt) {
  for (double b : breakpoints(cfg)) {
    if (std::abs(t - b) < 1.5 * dt) return true;
  }
  return false;
}

// Central differences of V carry an O(dt²) error whose constant scales
// with V⃛ ∝ k³: |V̇_fd − V̇| ≤ kFdCoefficient·k³·dt². The largest measured
// ratio over the three scenarios is about 3.1.
constexpr double kFdCoefficient = 10.0;

struct FdError {
  double worst = 0.0;   ///< max |V̇_fd − V̇| away from breakpoints
  double scaled = 0.0;  ///< worst / (k³ dt²)
};

FdError fd_error(const ScenarioConfig& cfg, const RunRecord& rec) {
  FdError e;
  for (const auto& row : rec.rows) {
    if (near_breakpoint(cfg, row.t, rec.dt)) continue;
    e.worst = std::max(e.worst, std::abs(row.V_dot_numeric - row.V_dot_closed));
  }
  e.scaled = e.worst / (std::pow(rec.gain, 3) * rec.dt * rec.dt);
  return e;
}

CriterionResult c6_lyapunov(const std::map<ScenarioId, TimedRun>& coarse,
                            const std::map<ScenarioId, TimedRun>& fine) {
  bool ok = true;
  double worst_rise = -std::numeric_limits<double>::infinity();
  double worst_scaled = 0.0;
  double min_order = std::numeric_limits<double>::infinity();
  double worst_split = 0.0;
  long checked = 0;
  for (const auto& [id, tr] : coarse) {
    const ScenarioConfig cfg = default_config(id);
    for (std::size_t v = 0; v < tr.records.size(); ++v) {
      const RunRecord& rec = tr.records[v];
      const bool certified = rec.theta_star.has_value();
      for (std::size_t i = 0; i + 1 < rec.rows.size(); ++i) {
        const RunRow& a = rec.rows[i];
        const RunRow& b = rec.rows[i + 1];
        const bool hypotheses =
            !certified || (a.inside_basin && b.inside_basin && a.margin > 0.0 && b.margin > 0.0);
        if (!hypotheses) continue;
        ++checked;
        worst_rise = std::max(worst_rise, b.V - a.V);
        if (b.V > a.V + 1e-7) ok = false;
      }
      for (const auto& row : rec.rows) {
        const double split = std::abs(row.V0 + row.V_E - row.V_dot_closed);
        worst_split = std::max(worst_split, split);
        if (!(split <= 1e-10 * std::max(1.0, rec.gain))) ok = false;
      }

      // Error level at dt and its observed order from dt to dt/2.
      const FdError ec = fd_error(cfg, rec);
      const FdError ef = fd_error(cfg, fine.at(id).records[v]);
      const double order = std::log2(ec.worst / ef.worst);
      worst_scaled = std::max(worst_scaled, ec.scaled);
      min_order = std::min(min_order, order);
      if (ec.scaled > kFdCoefficient || !(order >= 1.8)) ok = false;
    }
  }
  return {6, "lyapunov-monotonicity", ok,
          printf_string("max V step rise %.3g over %ld steps; max |dV_fd - dV|/(k^3 dt^2) %.3g "
                        "(limit %.0f), min observed order %.3f; max |V0 + V_E - dV| %.3g",
                        worst_rise, checked, worst_scaled, kFdCoefficient, min_order,
                        worst_split)};
}

CriterionResult c7_fig2(const TimedRun& sim1) {
  const ScenarioConfig cfg = default_config(ScenarioId::Sim1);
  const RunRecord& s3 = find(sim1, Variant::scalar(3));
  const RunRecord& s6 = find(sim1, Variant::scalar(6));
  const RunRecord& vb = find(sim1, Variant::vector_baseline());

  // The plateau is measured after a 5 s transient following the switch.
  const double settle = cfg.hold_start + 5.0;
  const std::size_t i_settle = row_at(s3, settle);
  const std::size_t i_end = row_at(s3, cfg.hold_end) - 1;  // last row inside (π, 4π]
  const std::size_t i_start = row_at(s3, cfg.hold_start);
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double seg_min = lo;
  for (std::size_t i = i_settle; i <= i_end; ++i) {
    lo = std::min(lo, s3.rows[i].theta_tilde_deg);
    hi = std::max(hi, s3.rows[i].theta_tilde_deg);
  }
  for (std::size_t i = i_start; i <= i_end; ++i) seg_min = std::min(seg_min, s3.rows[i].theta_tilde_deg);
  const bool plateau = hi - lo < 1.0 && seg_min > 5.0;

  auto through = [&](const RunRecord& r) {
    const double a = r.rows[i_start].theta_tilde_deg;
    const double b = r.rows[i_end].theta_tilde_deg;
    return b <= 0.5 * a || b < 0.1;
  };
  const bool others = through(s6) && through(vb);
  const double f3 = s3.rows.back().theta_tilde_deg;
  const double f6 = s6.rows.back().theta_tilde_deg;
  const double fv = vb.rows.back().theta_tilde_deg;
  const bool final_ok = f3 < 2.0 && f6 < 2.0 && fv < 2.0;
  const bool fast = sim1.seconds < 2.0;
  return {7, "fig2-plateau", plateau && others && final_ok && fast,
          printf_string("scalar-3 change %.3f deg on [%.2f, %.2f] s (min %.2f deg); across hold "
                        "scalar-6 %.2f->%.3f, vector %.2f->%.3g deg; final %.3f/%.3f/%.3g deg; "
                        "run %.2f s",
                        hi - lo, settle, s3.rows[i_end].t, seg_min,
                        s6.rows[i_start].theta_tilde_deg, s6.rows[i_end].theta_tilde_deg,
                        vb.rows[i_start].theta_tilde_deg, vb.rows[i_end].theta_tilde_deg, f3, f6,
                        fv, sim1.seconds)};
}

CriterionResult c8_certified(const TimedRun& sim2, const TimedRun& sim3) {
  bool ok = true;
  std::string detail;
  for (const auto* tr : {&sim2, &sim3}) {
    const RunRecord& rec = find(*tr, Variant::scalar(2));
    const bool start_inside = rec.rows.front().inside_basin;
    bool flipped = false;
    for (std::size_t i = 1; i < rec.rows.size(); ++i) {
      if (rec.rows[i - 1].inside_basin && !rec.rows[i].inside_basin) flipped = true;
    }
    const double final_deg = rec.rows.back().theta_tilde_deg;
    ok = ok && start_inside && !flipped && final_deg < 1.0;
    detail += printf_string("%s%s theta*=%.2f deg start %.2f deg inside=%d flips=%d final %.3f deg",
                            detail.empty() ? "" : "; ", to_string(rec.scenario).c_str(),
                            rad2deg(rec.theta_star.value_or(0.0)),
                            rec.rows.front().theta_tilde_deg, start_inside, flipped, final_deg);
  }
  return {8, "certified-convergence", ok, detail};
}

CriterionResult c9_refinement(const std::map<ScenarioId, TimedRun>& coarse,
                              const std::map<ScenarioId, TimedRun>& fine) {
  double worst = 0.0;
  double drift = 0.0;
  for (const auto& [id, c] : coarse) {
    const TimedRun& f = fine.at(id);
    for (std::size_t v = 0; v < c.records.size(); ++v) {
      const auto& rc = c.records[v].rows;
      const auto& rf = f.records[v].rows;
      for (std::size_t i = 0; i < rc.size(); ++i) {
        worst = std::max(worst, std::abs(deg2rad(rc[i].theta_tilde_deg - rf[2 * i].theta_tilde_deg)));
        drift = std::max(drift, rc[i].orthonormality_error);
      }
      for (const auto& row : rf) drift = std::max(drift, row.orthonormality_error);
    }
  }
  return {9, "integration-refinement", worst < 1e-4 && drift < 1e-9,
          printf_string("max |theta(dt) - theta(dt/2)| = %.3g rad, max orthonormality error %.3g",
                        worst, drift)};
}

// Sim 1 reads every vector along e₁ and R e₁ stays horizontal, so λ₂ of the
// window Gram comes from the yaw sweep alone. At a yaw turning point a 2 s
// window sees a variance of about (ψ₀ω²/2)²(1/5 − 1/9) ≈ 3.8e-4, the
// smallest value the excited segments reach. The floor sits below that.
constexpr double kPeFloor = 1e-4;

CriterionResult c10_pe(const TimedRun& sim1) {
  const ScenarioConfig cfg = default_config(ScenarioId::Sim1);
  const RunRecord& s3 = find(sim1, Variant::scalar(3));
  const double delta = cfg.pe_window;

  double held_max = 0.0;
  double seg1_min = std::numeric_limits<double>::infinity();
  double seg3_min = seg1_min;
  for (const auto& row : s3.rows) {
    if (row.t >= cfg.hold_start + delta + s3.dt && row.t <= cfg.hold_end) {
      held_max = std::max(held_max, row.mu_hat);
    } else if (row.t >= delta && row.t <= cfg.hold_start) {
      seg1_min = std::min(seg1_min, row.mu_hat);
    } else if (row.t >= cfg.hold_end + delta) {
      seg3_min = std::min(seg3_min, row.mu_hat);
    }
  }
  const bool ok = held_max < 1e-6 && seg1_min > kPeFloor && seg3_min > kPeFloor;
  return {10, "pe-metric", ok,
          printf_string("hold max mu %.3g (one window after switch); excited min mu %.4g "
                        "(segment 1), %.4g (segment 3), floor %.0e",
                        held_max, seg1_min, seg3_min, kPeFloor)};
}

}  // namespace

std::vector<CriterionResult> run_acceptance(
    const std::function<void(const CriterionResult&)>& on_result) {
  std::vector<CriterionResult> results;
  auto emit = [&](CriterionResult r) {
    if (on_result) on_result(r);
    results.push_back(std::move(r));
  };
  emit(c1_initial_error());
  emit(c2_theta_star());
  emit(c3_epsilon_bound());
  emit(c4_classical_reduction());
  emit(c5_closed_forms());

  // Sequential on purpose: criterion 7 times a single scenario run.
  const ScenarioId ids[] = {ScenarioId::Sim1, ScenarioId::Sim2, ScenarioId::Sim3};
  std::map<ScenarioId, TimedRun> coarse;
  for (ScenarioId id : ids) coarse[id] = timed_run(id, 1e-3);
  std::map<ScenarioId, TimedRun> fine;
  for (ScenarioId id : ids) fine[id] = timed_run(id, 5e-4);

  emit(c6_lyapunov(coarse, fine));
  emit(c7_fig2(coarse.at(ScenarioId::Sim1)));
  emit(c8_certified(coarse.at(ScenarioId::Sim2), coarse.at(ScenarioId::Sim3)));
  emit(c9_refinement(coarse, fine));
  emit(c10_pe(coarse.at(ScenarioId::Sim1)));
  return results;
}

}  // namespace scalarcf
