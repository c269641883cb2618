#include "viseme/geometry.hpp"

#include "viseme/error.hpp"

#include <algorithm>

namespace viseme {

Quat Quat::from_axis_angle(const Vec3& axis, double angle)
{
    const double n = axis.norm();
    if (n == 0.0) {
        throw NumericError("quaternion axis has zero length");
    }
    const Vec3 a = axis / n;
    const double s = std::sin(0.5 * angle);
    return {std::cos(0.5 * angle), a.x() * s, a.y() * s, a.z() * s};
}

Quat Quat::normalized() const
{
    const double n = norm();
    if (!(n > 0.0) || !std::isfinite(n)) {
        throw NumericError("cannot normalize a zero or non-finite quaternion");
    }
    return {w / n, x / n, y / n, z / n};
}

Quat Quat::operator*(const Quat& o) const noexcept
{
    return {w * o.w - x * o.x - y * o.y - z * o.z,
            w * o.x + x * o.w + y * o.z - z * o.y,
            w * o.y - x * o.z + y * o.w + z * o.x,
            w * o.z + x * o.y - y * o.x + z * o.w};
}

Mat3 Quat::to_matrix() const noexcept
{
    Mat3 r;
    r << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
        2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
        2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return r;
}

double Quat::angle() const noexcept
{
    const double v = std::sqrt(x * x + y * y + z * z);
    return 2.0 * std::atan2(v, std::abs(w));
}

double rotation_distance(const Quat& a, const Quat& b) noexcept
{
    const double d = std::min(1.0, std::abs(dot(a, b)));
    return 2.0 * std::acos(d);
}

}  // namespace viseme
