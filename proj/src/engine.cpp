#include "scalarcf/engine.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "scalarcf/analysis.hpp"
#include "scalarcf/errors.hpp"
#include "scalarcf/observer.hpp"

namespace scalarcf {

std::string to_string(Regime regime) {
  switch (regime) {
    case Regime::Theorem1: return "theorem1";
    case Regime::Lemma1: return "lemma1";
    case Regime::Lemma2: return "lemma2";
    case Regime::VectorBaseline: return "vector-baseline";
    case Regime::Generic: return "generic";
  }
  return "unknown";
}

Regime classify_regime(const SensorBank& bank) {
  if (bank.is_vector_bank()) return Regime::VectorBaseline;
  const DirectionMatrix& lambda = bank[0].lambda;
  for (const auto& c : bank.channels()) {
    if (c.lambda.cols() != lambda.cols() || c.lambda != lambda) return Regime::Generic;
  }
  const std::size_t p = bank.size();
  const auto n = lambda.cols();
  if (p >= 3 && gram(bank).rank == 3) return Regime::Theorem1;
  if (p == 2 && n == 1) return Regime::Lemma1;
  if (p == 1 && n == 2) return Regime::Lemma2;
  return Regime::Generic;
}

void differentiate_potential(std::vector<RunRow>& rows, double dt) {
  const std::size_t n = rows.size();
  if (n == 0) return;
  if (n == 1) {
    rows[0].V_dot_numeric = std::numeric_limits<double>::quiet_NaN();
    return;
  }
  if (n == 2) {
    rows[0].V_dot_numeric = rows[1].V_dot_numeric = (rows[1].V - rows[0].V) / dt;
    return;
  }
  for (std::size_t i = 1; i + 1 < n; ++i) {
    rows[i].V_dot_numeric = (rows[i + 1].V - rows[i - 1].V) / (2.0 * dt);
  }
  rows[0].V_dot_numeric = (-3.0 * rows[0].V + 4.0 * rows[1].V - rows[2].V) / (2.0 * dt);
  rows[n - 1].V_dot_numeric =
      (3.0 * rows[n - 1].V - 4.0 * rows[n - 2].V + rows[n - 3].V) / (2.0 * dt);
}

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

struct StageInput {
  VariantBank vb;
  Measurement y;
  Vec3 omega;
};

class VariantRunner {
 public:
  VariantRunner(const ScenarioConfig& cfg, const Variant& variant, const TrajectorySample& s0)
      : cfg_(cfg), pe_(cfg.pe_window) {
    record_.scenario = cfg.id;
    record_.variant = variant;
    record_.gain = variant_gain(cfg, variant);
    record_.dt = cfg.dt;
    const VariantBank vb = variant_bank(cfg, variant, s0.references);
    record_.regime = classify_regime(vb.bank);
    if (record_.regime == Regime::Theorem1) projector_ = lambda_pinv(vb.bank[0]).projector;
    if (record_.regime == Regime::Lemma1 || record_.regime == Regime::Lemma2) {
      record_.epsilon_bound = certificate_epsilon(cfg);
      if (record_.epsilon_bound) record_.theta_star = solve_theta_star(*record_.epsilon_bound);
    }
    state_ = ObserverState(cfg.R0_hat, record_.gain);
  }

  StageInput prepare(const TrajectorySample& s, const std::vector<Vec3>& noise) const {
    StageInput in{variant_bank(cfg_, record_.variant, s.references), {}, s.Omega};
    in.y = measure(in.vb.bank, s.R);
    if (!noise.empty()) {
      for (std::size_t i = 0; i < in.vb.bank.size(); ++i) {
        const auto ref = static_cast<std::size_t>(in.vb.reference_index[i]);
        const Vec3 n = noise[ref] * in.vb.reference_scale[i];
        in.y.channels[i] += in.vb.bank[i].lambda.transpose() * n;
      }
    }
    return in;
  }

  Vec3 delta(const StageInput& in, const Mat3& x) {
    const ObserverState st{Rotation::unchecked(x), record_.gain};
    if (record_.variant.kind == Variant::Kind::VectorBaseline) {
      return classical_innovation(in.vb.bank, st, in.y);
    }
    return workspace_.delta(in.vb.bank, st, in.y);
  }

  void log(const TrajectorySample& s, const StageInput& in) {
    const Rotation& rh = state_.r_hat;
    const ErrorMetrics m = error_metrics(s.R, rh);
    const Rotation rt = attitude_error(s.R, rh);
    const Vec3 d = delta(in, rh.matrix());
    const SensorBank& bank = in.vb.bank;
    const double k = record_.gain;

    RunRow row;
    row.t = s.t;
    row.theta_tilde_deg = rad2deg(m.theta_tilde);
    row.V = m.V;
    row.V_dot_closed = lyapunov_rate(d, rt);
    row.epsilon_value = kNaN;
    row.margin = kNaN;
    row.bound_rhs = kNaN;
    row.orthonormality_error = rh.orthonormality_error();

    std::optional<CertificateBound> bound;
    if (record_.theta_star) bound = CertificateBound{*record_.theta_star, *record_.epsilon_bound};

    switch (record_.regime) {
      case Regime::Theorem1: {
        // P = RΛΛ†Rᵀ with the projector cached at construction.
        const Mat3 p = s.R.matrix() * projector_ * s.R.matrix().transpose();
        row.V0 = projector_rate(p, rt, k);
        row.V_E = 0.0;
        pe_.update(s.t, s.R.matrix() * bank[0].lambda);
        break;
      }
      case Regime::VectorBaseline: {
        Mat3 b = Mat3::Zero();
        Eigen::Matrix<double, 3, Eigen::Dynamic> refs(3, bank.size());
        for (std::size_t i = 0; i < bank.size(); ++i) {
          b += bank[i].b * bank[i].b.transpose();
          refs.col(static_cast<Eigen::Index>(i)) = bank[i].b;
        }
        row.V0 = projector_rate(b, rt, k);
        row.V_E = 0.0;
        pe_.update(s.t, refs);
        break;
      }
      case Regime::Lemma1: {
        const Vec3 a = bank[0].lambda.col(0);
        row.epsilon_value = epsilon_lemma1(a, s.R, bank[0].b, bank[1].b);
        const LyapunovDecomposition dec =
            lyapunov_decompose_lemma1(a, s.R, rh, bank[0].b, bank[1].b, k, bound);
        row.V0 = dec.V0;
        row.V_E = dec.V_E;
        row.bound_rhs = dec.bound_rhs;
        pe_.update(s.t, s.R * a.normalized());
        break;
      }
      case Regime::Lemma2: {
        const Vec3 a1 = bank[0].lambda.col(0);
        const Vec3 a2 = bank[0].lambda.col(1);
        row.epsilon_value = epsilon_lemma2(a1, a2, s.R, bank[0].b);
        const LyapunovDecomposition dec =
            lyapunov_decompose_lemma2(a1, a2, s.R, rh, bank[0].b, k, bound);
        row.V0 = dec.V0;
        row.V_E = dec.V_E;
        row.bound_rhs = dec.bound_rhs;
        pe_.update(s.t, bank[0].b.normalized());
        break;
      }
      case Regime::Generic: {
        row.V0 = kNaN;
        row.V_E = kNaN;
        pe_.update(s.t, s.R.matrix() * bank[0].lambda);
        break;
      }
    }
    row.mu_hat = pe_.mu_hat();

    if (record_.theta_star && !std::isnan(row.epsilon_value)) {
      const BasinCertificate c = certify(m, *record_.theta_star, row.epsilon_value);
      row.margin = c.margin;
      row.inside_basin = c.inside_basin;
    }

    const EulerZyx e = to_euler_zyx(rh);
    row.yaw_deg = rad2deg(e.yaw);
    row.pitch_deg = rad2deg(e.pitch);
    row.roll_deg = rad2deg(e.roll);
    record_.rows.push_back(row);
  }

  void step(const StageInput& start, const StageInput& mid, const StageInput& end, double h,
            long step_index) {
    auto f = [&](const StageInput& in, const Mat3& x) -> Mat3 {
      return x * hat(in.omega) + hat(delta(in, x)) * x;
    };
    const Mat3& x0 = state_.r_hat.matrix();
    const Mat3 k1 = f(start, x0);
    const Mat3 k2 = f(mid, x0 + 0.5 * h * k1);
    const Mat3 k3 = f(mid, x0 + 0.5 * h * k2);
    const Mat3 k4 = f(end, x0 + h * k3);
    const Mat3 next = x0 + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    if (!next.allFinite()) {
      std::ostringstream os;
      os << "non-finite estimate in variant " << record_.variant.name() << " at step "
         << step_index;
      throw NonFiniteState(os.str(), step_index);
    }
    try {
      state_.r_hat = project_to_so3(next);
    } catch (const Degenerate& e) {
      std::ostringstream os;
      os << "degenerate estimate in variant " << record_.variant.name() << " at step "
         << step_index << ": " << e.what();
      throw NonFiniteState(os.str(), step_index);
    }
  }

  RunRecord finish() {
    differentiate_potential(record_.rows, cfg_.dt);
    return std::move(record_);
  }

  void reserve(std::size_t n) { record_.rows.reserve(n); }

 private:
  const ScenarioConfig& cfg_;
  RunRecord record_;
  ObserverState state_;
  InnovationWorkspace workspace_;
  PEWindow pe_;
  Mat3 projector_ = Mat3::Zero();
};

}  // namespace

std::vector<RunRecord> run(const ScenarioConfig& cfg_in, const std::vector<Variant>& variants) {
  ScenarioConfig cfg = cfg_in;
  cfg.validate();
  if (cfg.id != ScenarioId::Custom) cfg.R0_true = sample(cfg, 0.0).R;
  if (variants.empty()) throw IncompatibleVariant("no variants requested");

  const long steps = static_cast<long>(std::floor(cfg.duration / cfg.dt + 1e-9));
  const std::vector<double> bps = breakpoints(cfg);

  const TrajectorySample s0 = sample(cfg, 0.0);
  std::vector<VariantRunner> runners;
  runners.reserve(variants.size());
  for (const auto& v : variants) {
    runners.emplace_back(cfg, v, s0);
    runners.back().reserve(static_cast<std::size_t>(steps) + 1);
  }

  std::mt19937_64 rng(cfg.seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const std::size_t ref_count = s0.references.size();
  std::vector<Vec3> noise;

  // Inputs at the current grid time; without noise the end of one step
  // is reused as the start of the next.
  TrajectorySample s_now = s0;
  std::vector<StageInput> in_now(runners.size());
  int seg_now = segment_of(cfg, 0.0);
  for (long i = 0; i <= steps; ++i) {
    const double t = static_cast<double>(i) * cfg.dt;
    if (cfg.noise_std > 0.0) {
      noise.assign(ref_count, Vec3::Zero());
      for (auto& n : noise) {
        for (int c = 0; c < 3; ++c) n[c] = cfg.noise_std * gauss(rng);
      }
    }
    if (i == 0 || cfg.noise_std > 0.0) {
      for (std::size_t r = 0; r < runners.size(); ++r) in_now[r] = runners[r].prepare(s_now, noise);
    }
    for (std::size_t r = 0; r < runners.size(); ++r) runners[r].log(s_now, in_now[r]);
    if (i == steps) break;

    const double t_next = static_cast<double>(i + 1) * cfg.dt;
    std::vector<double> knots{t};
    for (double b : bps) {
      if (b > t && b < t_next) knots.push_back(b);
    }
    knots.push_back(t_next);

    for (std::size_t j = 0; j + 1 < knots.size(); ++j) {
      const double a = knots[j];
      const double b = knots[j + 1];
      const double mid = 0.5 * (a + b);
      const int seg = segment_of(cfg, mid);
      // Each substep uses one segment's formulas throughout, so the start
      // is resampled when the segment changes.
      if (seg != seg_now) {
        s_now = sample(cfg, a, seg);
        for (std::size_t r = 0; r < runners.size(); ++r) in_now[r] = runners[r].prepare(s_now, noise);
      }
      const TrajectorySample sm = sample(cfg, mid, seg);
      TrajectorySample sb = sample(cfg, b, seg);
      for (std::size_t r = 0; r < runners.size(); ++r) {
        StageInput im = runners[r].prepare(sm, noise);
        StageInput ib = runners[r].prepare(sb, noise);
        runners[r].step(in_now[r], im, ib, b - a, i);
        in_now[r] = std::move(ib);
      }
      s_now = std::move(sb);
      seg_now = seg;
    }
  }

  std::vector<RunRecord> out;
  out.reserve(runners.size());
  for (auto& r : runners) out.push_back(r.finish());
  return out;
}

}  // namespace scalarcf
