#pragma once

#include <Eigen/Dense>

namespace lumped_pid {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// hat(v)·w == v × w.
Mat3 hat(const Vec3& v);

/// Inverse of hat. Throws kNotSkew when ‖M + Mᵀ‖_F > 1e-9.
Vec3 vee(const Mat3& m);

/// vee of the skew-symmetric part (M − Mᵀ)/2; never throws.
Vec3 vee_skew_part(const Mat3& m);

/// exp(hat(phi)) by the Rodrigues formula, with a series fallback near 0.
Mat3 rodrigues(const Vec3& phi);

/// Rotation by `angle` about `axis` (normalized internally).
Mat3 axis_angle(const Vec3& axis, double angle);

/// Column-wise Gram–Schmidt onto SO(3); the third column is rebuilt as
/// c0 × c1 so det = +1.
Mat3 gram_schmidt(const Mat3& m);

/// ‖RᵀR − I‖_F.
double orthonormality_error(const Mat3& r);

}  // namespace lumped_pid
