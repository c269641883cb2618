#pragma once

#include "viseme/geometry.hpp"

namespace viseme {

/// Pinhole intrinsics in pixels.
struct Intrinsics {
    double focal = 1000.0;
    double cx = 0.0;
    double cy = 0.0;
};

/// Rigid head pose plus the fixed camera intrinsics.
struct Pose {
    Quat rotation;
    Vec3 translation = Vec3::Zero();
    Intrinsics intrinsics;
};

/// Rotates by the pose quaternion, translates, then applies the pinhole model.
/// Throws NumericError when the transformed depth is not positive.
Vec2 project(const Vec3& vertex, const Pose& pose);

/// Pinhole projection of a camera-space point; same depth precondition.
Vec2 project_camera_point(const Vec3& p, const Intrinsics& k);

}  // namespace viseme
