#include "lumped_pid/so3.hpp"

#include <cmath>

#include "lumped_pid/error.hpp"

namespace lumped_pid {

Mat3 hat(const Vec3& v) {
  Mat3 m;
  m << 0.0, -v.z(), v.y(),
       v.z(), 0.0, -v.x(),
       -v.y(), v.x(), 0.0;
  return m;
}

Vec3 vee(const Mat3& m) {
  if ((m + m.transpose()).norm() > 1e-9) throw Error(ErrorKind::kNotSkew, "vee() needs a skew-symmetric matrix");
  return {m(2, 1), m(0, 2), m(1, 0)};
}

Vec3 vee_skew_part(const Mat3& m) {
  return 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

Mat3 rodrigues(const Vec3& phi) {
  const double theta2 = phi.squaredNorm();
  const Mat3 k = hat(phi);
  double a, b;
  if (theta2 < 1e-8) {
    // Taylor terms of sin(θ)/θ and (1 − cos θ)/θ² to O(θ⁴).
    a = 1.0 - theta2 / 6.0 + theta2 * theta2 / 120.0;
    b = 0.5 - theta2 / 24.0 + theta2 * theta2 / 720.0;
  } else {
    const double theta = std::sqrt(theta2);
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Mat3::Identity() + a * k + b * k * k;
}

Mat3 axis_angle(const Vec3& axis, double angle) { return rodrigues(axis.normalized() * angle); }

Mat3 gram_schmidt(const Mat3& m) {
  Vec3 c0 = m.col(0).normalized();
  Vec3 c1 = m.col(1) - c0.dot(m.col(1)) * c0;
  c1.normalize();
  Mat3 r;
  r.col(0) = c0;
  r.col(1) = c1;
  r.col(2) = c0.cross(c1);
  return r;
}

double orthonormality_error(const Mat3& r) { return (r.transpose() * r - Mat3::Identity()).norm(); }

}  // namespace lumped_pid
