#include "viseme/camera.hpp"

#include "viseme/error.hpp"

namespace viseme {

Vec2 project_camera_point(const Vec3& p, const Intrinsics& k)
{
    if (!(p.z() > 0.0)) {
        throw NumericError("point behind the camera (depth " + std::to_string(p.z()) + ")");
    }
    return {k.focal * p.x() / p.z() + k.cx, k.focal * p.y() / p.z() + k.cy};
}

Vec2 project(const Vec3& vertex, const Pose& pose)
{
    const Vec3 p = pose.rotation.to_matrix() * vertex + pose.translation;
    return project_camera_point(p, pose.intrinsics);
}

}  // namespace viseme
