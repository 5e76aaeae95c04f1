#include "imudse/rotation.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace imudse {

namespace {

Mat3 skew(const Vec3& v)
{
    Mat3 k;
    k << 0.0, -v.z(), v.y(),
         v.z(), 0.0, -v.x(),
         -v.y(), v.x(), 0.0;
    return k;
}

} // namespace

Mat3 axis_angle_to_matrix(const Vec3& axis_angle)
{
    const double theta2 = axis_angle.squaredNorm();
    const Mat3 k = skew(axis_angle);
    double a = 0.0;
    double b = 0.0;
    if (theta2 < 1e-12) {
        // Taylor expansions of sin(t)/t and (1 - cos(t))/t^2.
        a = 1.0 - theta2 / 6.0;
        b = 0.5 - theta2 / 24.0;
    } else {
        const double theta = std::sqrt(theta2);
        a = std::sin(theta) / theta;
        b = (1.0 - std::cos(theta)) / theta2;
    }
    return Mat3::Identity() + a * k + b * (k * k);
}

Vec3 matrix_to_axis_angle(const Mat3& rotation)
{
    const double cos_theta = std::clamp((rotation.trace() - 1.0) * 0.5, -1.0, 1.0);
    const Vec3 w(rotation(2, 1) - rotation(1, 2),
                 rotation(0, 2) - rotation(2, 0),
                 rotation(1, 0) - rotation(0, 1));
    const double sin_theta = 0.5 * w.norm();
    const double theta = std::atan2(sin_theta, cos_theta);

    if (sin_theta < 1e-12 && cos_theta > 0.0)
        return 0.5 * w; // near identity: w ~ 2 sin(theta) * axis

    if (cos_theta < -0.99) {
        // Near pi the antisymmetric part vanishes; recover the axis from the
        // symmetric part R + R^T = 2 cos(t) I + 2 (1 - cos(t)) a a^T.
        const Mat3 s = 0.5 * (rotation + rotation.transpose()) - cos_theta * Mat3::Identity();
        Eigen::Index col = 0;
        s.diagonal().maxCoeff(&col);
        Vec3 axis = s.col(col).normalized();
        if (axis.dot(w) < 0.0)
            axis = -axis;
        return theta * axis;
    }
    return (theta / (2.0 * std::sin(theta))) * w;
}

double geodesic_angle_deg(const Mat3& r1, const Mat3& r2)
{
    // atan2 of the (sin, cos) pair is the same angle as arccos of the clamped
    // cosine but keeps full precision near 0 and 180 degrees.
    const Mat3 m = r1.transpose() * r2;
    const double c = std::clamp((m.trace() - 1.0) * 0.5, -1.0, 1.0);
    const double s = 0.5 * Vec3(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1)).norm();
    return std::atan2(s, c) * 180.0 / std::numbers::pi;
}

double orthonormality_error(const Mat3& rotation)
{
    return (rotation.transpose() * rotation - Mat3::Identity()).cwiseAbs().maxCoeff();
}

} // namespace imudse
