#include "scalarcf/so3.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <sstream>

#include "scalarcf/errors.hpp"

namespace scalarcf {

Rotation Rotation::from_matrix(const Mat3& m) {
  if (!m.allFinite()) throw InvalidRotation("rotation matrix has non-finite entries");
  const double ortho = (m * m.transpose() - Mat3::Identity()).norm();
  const double det = m.determinant();
  if (ortho > kOrthoTolerance || std::abs(det - 1.0) > kOrthoTolerance) {
    std::ostringstream os;
    os << "matrix is not a rotation (‖MMᵀ−I‖ = " << ortho << ", det = " << det << ")";
    throw InvalidRotation(os.str());
  }
  return unchecked(m);
}

double Rotation::orthonormality_error() const {
  return (m_.transpose() * m_ - Mat3::Identity()).norm();
}

Mat3 hat(const Vec3& w) {
  Mat3 m;
  m << 0.0, -w.z(), w.y(),
       w.z(), 0.0, -w.x(),
       -w.y(), w.x(), 0.0;
  return m;
}

Mat3 skew_part(const Mat3& m) { return 0.5 * (m - m.transpose()); }

Vec3 vee(const Mat3& m, double tol) {
  const Mat3 sym = 0.5 * (m + m.transpose());
  if (sym.cwiseAbs().maxCoeff() > tol) {
    throw NotSkew("matrix is not skew-symmetric (symmetric part " +
                  std::to_string(sym.cwiseAbs().maxCoeff()) + ")");
  }
  const Mat3 s = skew_part(m);
  return {s(2, 1), s(0, 2), s(1, 0)};
}

Rotation exp_so3(const Vec3& w) {
  const double theta = w.norm();
  const Mat3 k = hat(w);
  if (theta < 1e-6) {
    return Rotation::unchecked(Mat3::Identity() + k + 0.5 * k * k);
  }
  const double a = std::sin(theta) / theta;
  const double b = (1.0 - std::cos(theta)) / (theta * theta);
  return Rotation::unchecked(Mat3::Identity() + a * k + b * k * k);
}

AxisAngle log_so3(const Rotation& r) {
  const Mat3& m = r.matrix();
  const double c = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  // s = sin(θ)·u
  const Vec3 s{0.5 * (m(2, 1) - m(1, 2)), 0.5 * (m(0, 2) - m(2, 0)), 0.5 * (m(1, 0) - m(0, 1))};
  const double sn = s.norm();

  AxisAngle out;
  out.angle = std::atan2(sn, c);

  if (c >= 0.0) {
    if (sn > 0.0) out.axis = s / sn;
    return out;
  }

  // Near π the antisymmetric part vanishes; recover u from uuᵀ instead.
  const Mat3 uut = (0.5 * (m + m.transpose()) - c * Mat3::Identity()) / (1.0 - c);
  Eigen::Index j = 0;
  uut.diagonal().maxCoeff(&j);
  Vec3 u = uut.col(j) / std::sqrt(std::max(uut(j, j), 1e-300));
  u.normalize();
  if (u.dot(s) < 0.0) u = -u;
  out.axis = u;
  return out;
}

Rotation project_to_so3(const Mat3& m) {
  if (!m.allFinite()) throw Degenerate("cannot project a non-finite matrix");
  if (m.determinant() <= 0.0) throw Degenerate("cannot project a matrix with det <= 0");
  Eigen::JacobiSVD<Mat3> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
  if (svd.singularValues().minCoeff() < 1e-9) {
    throw Degenerate("smallest singular value below 1e-9");
  }
  return Rotation::unchecked(svd.matrixU() * svd.matrixV().transpose());
}

Rotation rot_x(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << 1, 0, 0,
       0, c, -s,
       0, s, c;
  return Rotation::unchecked(m);
}

Rotation rot_y(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, 0, s,
       0, 1, 0,
       -s, 0, c;
  return Rotation::unchecked(m);
}

Rotation rot_z(double a) {
  const double c = std::cos(a), s = std::sin(a);
  Mat3 m;
  m << c, -s, 0,
       s, c, 0,
       0, 0, 1;
  return Rotation::unchecked(m);
}

Rotation euler_zyx(double yaw, double pitch, double roll) {
  return rot_z(yaw) * rot_y(pitch) * rot_x(roll);
}

EulerZyx to_euler_zyx(const Rotation& r) {
  const Mat3& m = r.matrix();
  EulerZyx e;
  e.pitch = std::asin(std::clamp(-m(2, 0), -1.0, 1.0));
  e.yaw = std::atan2(m(1, 0), m(0, 0));
  e.roll = std::atan2(m(2, 1), m(2, 2));
  return e;
}

Mat3 plane_projector(const Vec3& v) {
  const Vec3 u = v.normalized();
  return Mat3::Identity() - u * u.transpose();
}

double sin_angle(const Vec3& u, const Vec3& v) {
  return u.normalized().cross(v.normalized()).norm();
}

}  // namespace scalarcf
