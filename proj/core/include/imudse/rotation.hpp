#pragma once

#include <Eigen/Core>

namespace imudse {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rodrigues' formula. The zero vector maps to the identity.
Mat3 axis_angle_to_matrix(const Vec3& axis_angle);

/// Inverse of axis_angle_to_matrix; the returned angle lies in [0, pi].
Vec3 matrix_to_axis_angle(const Mat3& rotation);

/// Angle of r1^T r2 in degrees, in [0, 180]. The arccos argument is clamped.
double geodesic_angle_deg(const Mat3& r1, const Mat3& r2);

/// Max-abs entry of R^T R - I.
double orthonormality_error(const Mat3& rotation);

} // namespace imudse
