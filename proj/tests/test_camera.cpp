#include "support.hpp"

#include "viseme/camera.hpp"
#include "viseme/error.hpp"
#include "viseme/geometry.hpp"

#include <Eigen/LU>
#include <gtest/gtest.h>

#include <numbers>

using namespace viseme;

TEST(Project, OpticalAxisHitsPrincipalPoint)
{
    const Pose pose{Quat::identity(), Vec3::Zero(), {500.0, 320.0, 240.0}};
    EXPECT_EQ(project(Vec3(0, 0, 1), pose), Vec2(320, 240));
}

TEST(Project, DirectFormula)
{
    const Pose pose{Quat::identity(), Vec3::Zero(), {100.0, 0.0, 0.0}};
    EXPECT_EQ(project(Vec3(1, 0, 1), pose), Vec2(100, 0));
}

TEST(Project, NonPositiveDepthThrows)
{
    const Pose pose{Quat::identity(), Vec3::Zero(), {100.0, 0.0, 0.0}};
    EXPECT_THROW(project(Vec3(1, 0, 0), pose), NumericError);
    EXPECT_THROW(project(Vec3(1, 0, -2), pose), NumericError);
    const Pose back{Quat::identity(), Vec3(0, 0, -3), {100.0, 0.0, 0.0}};
    EXPECT_THROW(project(Vec3(0, 0, 1), back), NumericError);
}

TEST(Project, RotationAppliedBeforeTranslation)
{
    const Pose pose{Quat::from_axis_angle(Vec3::UnitY(), std::numbers::pi / 2), Vec3(0, 0, 5), {100.0, 0.0, 0.0}};
    // (0,0,1) rotated 90 deg about y goes to (1,0,0), then translated to (1,0,5).
    const Vec2 p = project(Vec3(0, 0, 1), pose);
    EXPECT_NEAR(p.x(), 20.0, 1e-12);
    EXPECT_NEAR(p.y(), 0.0, 1e-12);
}

TEST(Quat, MatrixIsOrthonormalForUnitInput)
{
    test::Rng rng(1);
    for (int k = 0; k < 200; ++k) {
        const Mat3 r = rng.unit_quat().to_matrix();
        EXPECT_LT((r * r.transpose() - Mat3::Identity()).norm(), 1e-12);
        EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    }
}

TEST(Quat, ProductComposesRotations)
{
    test::Rng rng(2);
    for (int k = 0; k < 100; ++k) {
        const Quat a = rng.unit_quat();
        const Quat b = rng.unit_quat();
        EXPECT_LT(((a * b).to_matrix() - a.to_matrix() * b.to_matrix()).norm(), 1e-12);
    }
}

TEST(Quat, AxisAngleAndDistance)
{
    const Quat q = Quat::from_axis_angle(Vec3::UnitZ(), 0.4);
    EXPECT_NEAR(q.angle(), 0.4, 1e-12);
    EXPECT_NEAR(rotation_distance(q, -q), 0.0, 1e-7);
    EXPECT_NEAR(rotation_distance(Quat::identity(), q), 0.4, 1e-12);
    EXPECT_THROW((Quat{0, 0, 0, 0}.normalized()), NumericError);
}
