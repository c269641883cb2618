#pragma once

#include <Eigen/Core>

#include <cmath>

namespace viseme {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Rotation quaternion, scalar-first. Not normalized implicitly.
struct Quat {
    double w = 1.0;
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    static Quat identity() noexcept { return {}; }
    static Quat from_axis_angle(const Vec3& axis, double angle);

    double norm() const noexcept { return std::sqrt(w * w + x * x + y * y + z * z); }
    Quat normalized() const;
    Quat operator-() const noexcept { return {-w, -x, -y, -z}; }
    Quat operator*(const Quat& o) const noexcept;
    Quat conjugate() const noexcept { return {w, -x, -y, -z}; }

    /// Rotation matrix of the quaternion's polynomial form; orthonormal for unit input.
    Mat3 to_matrix() const noexcept;
    /// Angle of the represented rotation in [0, pi].
    double angle() const noexcept;
};

inline double dot(const Quat& a, const Quat& b) noexcept
{
    return a.w * b.w + a.x * b.x + a.y * b.y + a.z * b.z;
}

/// Angle between the rotations of two unit quaternions, independent of sign.
double rotation_distance(const Quat& a, const Quat& b) noexcept;

}  // namespace viseme
