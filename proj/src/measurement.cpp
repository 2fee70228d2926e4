#include "scalarcf/measurement.hpp"

#include <Eigen/SVD>
#include <string>

#include "scalarcf/errors.hpp"

namespace scalarcf {

SensorChannel::SensorChannel(const Vec3& b_in, const DirectionMatrix& lambda_in)
    : b(b_in), lambda(lambda_in) {
  if (lambda.cols() < 1 || lambda.cols() > 3) {
    throw InvalidBank("a channel needs between 1 and 3 measurement directions, got " +
                      std::to_string(lambda.cols()));
  }
  if (!b.allFinite() || !lambda.allFinite()) {
    throw InvalidBank("channel has non-finite entries");
  }
}

SensorBank::SensorBank(std::vector<SensorChannel> channels) : channels_(std::move(channels)) {
  if (channels_.empty()) throw InvalidBank("a sensor bank needs at least one channel");
}

int SensorBank::scalar_count() const {
  int m = 0;
  for (const auto& c : channels_) m += c.size();
  return m;
}

bool SensorBank::is_vector_bank(double tol) const {
  for (const auto& c : channels_) {
    if (c.size() != 3) return false;
    if ((c.lambda - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  }
  return true;
}

Eigen::VectorXd Measurement::stacked() const {
  Eigen::Index m = 0;
  for (const auto& c : channels) m += c.size();
  Eigen::VectorXd y(m);
  Eigen::Index k = 0;
  for (const auto& c : channels) {
    y.segment(k, c.size()) = c;
    k += c.size();
  }
  return y;
}

Measurement measure(const SensorBank& bank, const Rotation& r) {
  Measurement y;
  y.channels.reserve(bank.size());
  const Mat3 rt = r.matrix().transpose();
  for (const auto& c : bank.channels()) {
    y.channels.emplace_back(c.lambda.transpose() * (rt * c.b));
  }
  return y;
}

Measurement output_error(const SensorBank& bank, const Rotation& r_hat, const Measurement& y) {
  if (y.size() != bank.size()) {
    throw DimensionMismatch("measurement has " + std::to_string(y.size()) +
                            " channels, bank has " + std::to_string(bank.size()));
  }
  Measurement err = measure(bank, r_hat);
  for (std::size_t i = 0; i < bank.size(); ++i) {
    if (y.channels[i].size() != err.channels[i].size()) {
      throw DimensionMismatch("channel " + std::to_string(i) + " has " +
                              std::to_string(y.channels[i].size()) + " scalars, expected " +
                              std::to_string(err.channels[i].size()));
    }
    err.channels[i] -= y.channels[i];
  }
  return err;
}

namespace {

template <typename Matrix>
GramFactorization gram_from_columns(const Matrix& refs, double rel_tol) {
  GramFactorization g;
  g.S = refs * refs.transpose();
  Eigen::JacobiSVD<Matrix> svd(refs, Eigen::ComputeFullU);
  const auto& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) <= 0.0) return g;
  const double cutoff = rel_tol * sigma(0);
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) <= cutoff) break;
    const Vec3 u = svd.matrixU().col(i);
    const double lambda = sigma(i) * sigma(i);
    g.S_pinv += (u * u.transpose()) / lambda;
    g.lambda_min_nonzero = lambda;
    ++g.rank;
  }
  return g;
}

}  // namespace

GramFactorization gram(const SensorBank& bank, double rel_tol) {
  const auto p = static_cast<Eigen::Index>(bank.size());
  if (p <= 3) {
    DirectionMatrix refs(3, p);
    for (Eigen::Index i = 0; i < p; ++i) refs.col(i) = bank[i].b;
    return gram_from_columns(refs, rel_tol);
  }
  Eigen::Matrix<double, 3, Eigen::Dynamic> refs(3, p);
  for (Eigen::Index i = 0; i < p; ++i) refs.col(i) = bank[i].b;
  return gram_from_columns(refs, rel_tol);
}

LambdaPinv lambda_pinv(const SensorChannel& channel, double rel_tol) {
  const DirectionMatrix& lam = channel.lambda;
  const Eigen::Index n = lam.cols();
  LambdaPinv out;
  out.lambda_t_pinv = DirectionMatrix::Zero(3, n);
  out.lambda_pinv = DirectionMatrixT::Zero(n, 3);

  // Λ = U Σ Wᵀ  ⇒  (Λᵀ)† = U Σ⁻¹ Wᵀ,  Λ† = W Σ⁻¹ Uᵀ.
  Eigen::JacobiSVD<DirectionMatrix> svd(lam, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const auto& sigma = svd.singularValues();
  if (sigma.size() == 0 || sigma(0) <= 0.0) return out;
  const double cutoff = rel_tol * sigma(0);
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma(i) <= cutoff) break;
    const Vec3 u = svd.matrixU().col(i);
    const auto w = svd.matrixV().col(i);
    out.lambda_t_pinv.noalias() += (u * w.transpose()) / sigma(i);
    out.lambda_pinv.noalias() += (w * u.transpose()) / sigma(i);
    out.projector += u * u.transpose();
    ++out.rank;
  }
  return out;
}

}  // namespace scalarcf
