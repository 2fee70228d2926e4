#include "scalarcf/observer.hpp"

#include <stdexcept>

#include "scalarcf/errors.hpp"

namespace scalarcf {

ObserverState::ObserverState(const Rotation& r, double gain) : r_hat(r), k(gain) {
  if (!(k > 0.0)) throw std::invalid_argument("observer gain must be positive");
}

InnovationReport innovation(const SensorBank& bank, const ObserverState& state,
                            const Measurement& y, double rel_tol) {
  const Measurement err = output_error(bank, state.r_hat, y);
  const GramFactorization g = gram(bank, rel_tol);
  const Mat3& rh = state.r_hat.matrix();

  InnovationReport report;
  report.contributions.reserve(bank.size());
  for (std::size_t i = 0; i < bank.size(); ++i) {
    const LambdaPinv lp = lambda_pinv(bank[i], rel_tol);
    const Vec3 term = state.k * (hat(g.S_pinv * bank[i].b) * (rh * (lp.lambda_t_pinv * err.channels[i])));
    report.contributions.push_back(term);
    report.delta += term;
  }
  return report;
}

Vec3 classical_innovation(const SensorBank& bank, const ObserverState& state,
                          const Measurement& y) {
  if (!bank.is_vector_bank()) {
    throw NotVectorBank("classical innovation requires Λ_i = I₃ on every channel");
  }
  if (y.size() != bank.size()) throw DimensionMismatch("measurement does not match bank");
  const Mat3& rh = state.r_hat.matrix();
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < bank.size(); ++i) {
    if (y.channels[i].size() != 3) throw DimensionMismatch("vector channel needs 3 scalars");
    const Vec3 measured = y.channels[i];
    sum += measured.cross(rh.transpose() * bank[i].b);
  }
  return state.k * (rh * sum);
}

Vec3 InnovationWorkspace::delta(const SensorBank& bank, const ObserverState& state,
                                const Measurement& y) {
  if (y.size() != bank.size()) throw DimensionMismatch("measurement does not match bank");
  const std::size_t p = bank.size();

  bool refs_same = refs_.size() == p;
  for (std::size_t i = 0; refs_same && i < p; ++i) refs_same = refs_[i] == bank[i].b;
  if (!refs_same) {
    refs_.resize(p);
    for (std::size_t i = 0; i < p; ++i) refs_[i] = bank[i].b;
    s_pinv_ = gram(bank, rel_tol_).S_pinv;
  }

  if (lambdas_.size() != p) {
    lambdas_.assign(p, DirectionMatrix());
    lambda_pinvs_.assign(p, LambdaPinv());
  }

  const Mat3& rh = state.r_hat.matrix();
  const Mat3 rht = rh.transpose();
  Vec3 sum = Vec3::Zero();
  for (std::size_t i = 0; i < p; ++i) {
    const SensorChannel& c = bank[i];
    if (y.channels[i].size() != c.size()) {
      throw DimensionMismatch("channel " + std::to_string(i) + " size mismatch");
    }
    if (lambdas_[i].cols() != c.lambda.cols() || lambdas_[i] != c.lambda) {
      lambdas_[i] = c.lambda;
      lambda_pinvs_[i] = lambda_pinv(c, rel_tol_);
    }
    const ChannelVector err = c.lambda.transpose() * (rht * c.b) - y.channels[i];
    sum += hat(s_pinv_ * c.b) * (rh * (lambda_pinvs_[i].lambda_t_pinv * err));
  }
  return state.k * sum;
}

ObserverState observer_step(const ObserverState& state, const Vec3& omega, const Vec3& delta,
                            double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const Mat3 w = hat(omega);
  const Mat3 d = hat(delta);
  ObserverState next = state;
  next.r_hat = rk4_step(state.r_hat, 0.0, dt,
                        [&](double, const Mat3& x) -> Mat3 { return x * w + d * x; });
  return next;
}

Rotation truth_step(const Rotation& r, const Vec3& omega, double dt) {
  if (!(dt > 0.0)) throw std::invalid_argument("time step must be positive");
  const Mat3 w = hat(omega);
  return rk4_step(r, 0.0, dt, [&](double, const Mat3& x) -> Mat3 { return x * w; });
}

}  // namespace scalarcf
