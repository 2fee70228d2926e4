#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace scalarcf {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Element of SO(3) stored as an orthonormal 3x3 matrix with det = +1.
///
/// Construction through from_matrix() validates the invariants; the
/// group operations below preserve them up to round-off.
class Rotation {
 public:
  static constexpr double kOrthoTolerance = 1e-9;

  Rotation() : m_(Mat3::Identity()) {}

  static Rotation identity() { return Rotation(); }

  /// Throws InvalidRotation when ‖MMᵀ − I‖ or |det M − 1| exceed 1e-9.
  static Rotation from_matrix(const Mat3& m);

  /// Skips validation. Caller guarantees m is a rotation.
  static Rotation unchecked(const Mat3& m) {
    Rotation r;
    r.m_ = m;
    return r;
  }

  const Mat3& matrix() const { return m_; }
  Rotation transpose() const { return unchecked(m_.transpose()); }
  Rotation inverse() const { return transpose(); }

  Rotation operator*(const Rotation& other) const { return unchecked(m_ * other.m_); }
  Vec3 operator*(const Vec3& v) const { return m_ * v; }

  double trace() const { return m_.trace(); }

  /// ‖RᵀR − I‖ (Frobenius).
  double orthonormality_error() const;

 private:
  Mat3 m_;
};

struct AxisAngle {
  Vec3 axis{1.0, 0.0, 0.0};
  double angle = 0.0;

  Vec3 vector() const { return angle * axis; }
};

/// Yaw/pitch/roll triple for R = R_z(yaw) R_y(pitch) R_x(roll), radians.
struct EulerZyx {
  double yaw = 0.0;
  double pitch = 0.0;
  double roll = 0.0;
};

/// Skew-symmetric matrix with hat(w)·v = w × v.
Mat3 hat(const Vec3& w);

/// Inverse of hat. Throws NotSkew when the symmetric part of M exceeds tol.
Vec3 vee(const Mat3& m, double tol = 1e-8);

/// Skew-symmetric part (M − Mᵀ)/2.
Mat3 skew_part(const Mat3& m);

/// Rodrigues exponential; second-order Taylor expansion below 1e-6 rad.
Rotation exp_so3(const Vec3& w);

/// Principal logarithm. Angle in [0, π]; identity maps to axis (1,0,0).
AxisAngle log_so3(const Rotation& r);

/// Nearest rotation in Frobenius norm (orthonormal polar factor).
/// Throws Degenerate if det(M) <= 0 or the smallest singular value < 1e-9.
Rotation project_to_so3(const Mat3& m);

Rotation rot_x(double angle);
Rotation rot_y(double angle);
Rotation rot_z(double angle);

Rotation euler_zyx(double yaw, double pitch, double roll);
inline Rotation euler_zyx(const EulerZyx& e) { return euler_zyx(e.yaw, e.pitch, e.roll); }

/// Inverse of euler_zyx with pitch in [−π/2, π/2].
EulerZyx to_euler_zyx(const Rotation& r);

/// Orthogonal projector onto the plane normal to v (v normalized internally).
Mat3 plane_projector(const Vec3& v);

/// Sine of the angle between two non-zero vectors, ‖û × v̂‖.
double sin_angle(const Vec3& u, const Vec3& v);

constexpr double kPi = 3.14159265358979323846;
constexpr double deg2rad(double d) { return d * kPi / 180.0; }
constexpr double rad2deg(double r) { return r * 180.0 / kPi; }

}  // namespace scalarcf
