#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>

#include <Eigen/Geometry>

namespace sabd {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Transform = Eigen::Isometry3d;

inline constexpr double kPi = std::numbers::pi;

inline Transform translation(const Vec3& t) {
    Transform out = Transform::Identity();
    out.translation() = t;
    return out;
}

/// Rotation about a unit axis through the frame origin.
inline Transform rotation(const Vec3& axis, double angle) {
    Transform out = Transform::Identity();
    out.linear() = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
    return out;
}

/// Extrinsic roll-pitch-yaw (X, then Y, then Z) as used by the hand description.
inline Mat3 rpy_matrix(const Vec3& rpy) {
    return (Eigen::AngleAxisd(rpy.z(), Vec3::UnitZ()) * Eigen::AngleAxisd(rpy.y(), Vec3::UnitY()) *
            Eigen::AngleAxisd(rpy.x(), Vec3::UnitX()))
        .toRotationMatrix();
}

inline Vec3 matrix_rpy(const Mat3& r) {
    // Inverse of rpy_matrix away from the pitch singularity.
    const double pitch = std::asin(std::clamp(-r(2, 0), -1.0, 1.0));
    const double roll = std::atan2(r(2, 1), r(2, 2));
    const double yaw = std::atan2(r(1, 0), r(0, 0));
    return {roll, pitch, yaw};
}

inline Transform make_transform(const Vec3& xyz, const Vec3& rpy) {
    Transform out = Transform::Identity();
    out.linear() = rpy_matrix(rpy);
    out.translation() = xyz;
    return out;
}

/// Rotation angle of a rotation matrix, in [0, pi].
inline double rotation_angle(const Mat3& r) {
    return Eigen::AngleAxisd(r).angle();
}

/// Signed angle from `a` to `b` about `axis` (vectors need not be unit or
/// perpendicular to the axis).
inline double signed_angle(const Vec3& a, const Vec3& b, const Vec3& axis) {
    return std::atan2(a.cross(b).dot(axis.normalized()), a.dot(b));
}

inline Vec3 project_onto_plane(const Vec3& v, const Vec3& unit_normal) {
    return v - v.dot(unit_normal) * unit_normal;
}

}  // namespace sabd
