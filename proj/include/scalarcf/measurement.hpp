#pragma once

#include <Eigen/Core>
#include <limits>
#include <vector>

#include "scalarcf/so3.hpp"

namespace scalarcf {

/// 3×n matrix of body-frame measurement directions, n ∈ {1,2,3}.
using DirectionMatrix = Eigen::Matrix<double, 3, Eigen::Dynamic, Eigen::ColMajor, 3, 3>;
/// n×3 counterpart (Λ†).
using DirectionMatrixT = Eigen::Matrix<double, Eigen::Dynamic, 3, Eigen::RowMajor, 3, 3>;
/// Scalar outputs of a single channel, length n ≤ 3.
using ChannelVector = Eigen::Matrix<double, Eigen::Dynamic, 1, Eigen::ColMajor, 3, 1>;

/// Relative singular-value cutoff used by every pseudoinverse in the library.
inline constexpr double kDefaultPinvTolerance = 3.0 * std::numeric_limits<double>::epsilon();

/// One known inertial vector b measured along the columns of lambda.
struct SensorChannel {
  Vec3 b = Vec3::Zero();
  DirectionMatrix lambda;

  SensorChannel() = default;
  /// Validates n ∈ {1,2,3} and finite entries; throws InvalidBank.
  SensorChannel(const Vec3& b, const DirectionMatrix& lambda);

  int size() const { return static_cast<int>(lambda.cols()); }
};

/// Ordered collection of channels; the stacked output has m = Σ n_i rows.
class SensorBank {
 public:
  SensorBank() = default;
  /// Throws InvalidBank when empty.
  explicit SensorBank(std::vector<SensorChannel> channels);

  const std::vector<SensorChannel>& channels() const { return channels_; }
  const SensorChannel& operator[](std::size_t i) const { return channels_[i]; }
  std::size_t size() const { return channels_.size(); }
  int scalar_count() const;

  /// True if every channel measures the full vector (Λ_i = I₃).
  bool is_vector_bank(double tol = 1e-12) const;

 private:
  std::vector<SensorChannel> channels_;
};

struct Measurement {
  std::vector<ChannelVector> channels;

  Eigen::VectorXd stacked() const;
  std::size_t size() const { return channels.size(); }
};

struct GramFactorization {
  Mat3 S = Mat3::Zero();
  Mat3 S_pinv = Mat3::Zero();
  int rank = 0;
  /// Smallest retained eigenvalue of S; zero when rank == 0.
  double lambda_min_nonzero = 0.0;

  /// λ₁(S) ≥ mu, i.e. S invertible with margin.
  bool uniformly_definite(double mu) const { return rank == 3 && lambda_min_nonzero >= mu; }
};

struct LambdaPinv {
  /// (Λᵀ)†, 3×n.
  DirectionMatrix lambda_t_pinv;
  /// Λ†, n×3.
  DirectionMatrixT lambda_pinv;
  /// ΛΛ†, the orthogonal projector onto span(Λ).
  Mat3 projector = Mat3::Zero();
  int rank = 0;
};

/// y_i = Λ_iᵀ Rᵀ b_i, channel by channel.
Measurement measure(const SensorBank& bank, const Rotation& r);

/// ỹ_i = Λ_iᵀ R̂ᵀ b_i − y_i. Throws DimensionMismatch if y does not fit the bank.
Measurement output_error(const SensorBank& bank, const Rotation& r_hat, const Measurement& y);

/// S = Σ b_i b_iᵀ and its pseudoinverse. Rank is decided on the singular
/// values σ of B = [b_1 … b_p] with cutoff rel_tol·σ_max (S = BBᵀ).
GramFactorization gram(const SensorBank& bank, double rel_tol = kDefaultPinvTolerance);

/// Moore–Penrose pseudoinverse of Λᵀ via SVD, same cutoff policy as gram().
LambdaPinv lambda_pinv(const SensorChannel& channel, double rel_tol = kDefaultPinvTolerance);

}  // namespace scalarcf
