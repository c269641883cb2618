#include "support.hpp"

#include "viseme/animation.hpp"
#include "viseme/error.hpp"
#include "viseme/text_io.hpp"

#include <gtest/gtest.h>

#include <numbers>

using namespace viseme;

namespace {

double quat_gap(const Quat& a, const Quat& b)
{
    const double plus = std::abs(a.w - b.w) + std::abs(a.x - b.x) + std::abs(a.y - b.y) + std::abs(a.z - b.z);
    const double minus = std::abs(a.w + b.w) + std::abs(a.x + b.x) + std::abs(a.y + b.y) + std::abs(a.z + b.z);
    return std::min(plus, minus);
}

Curve random_curve(test::Rng& rng, std::size_t frames, std::size_t visemes, double fps)
{
    Curve c(fps, default_viseme_labels(visemes), frames);
    for (auto& row : c.frames) {
        for (auto& v : row) {
            v = rng.uniform();
        }
    }
    return c;
}

BonePoseAssets random_assets(test::Rng& rng, std::size_t bones, std::size_t visemes)
{
    BonePoseAssets a;
    auto pose = [&] {
        BonePose p(bones);
        for (auto& b : p) {
            b.rotation = rng.unit_quat();
            b.translation = rng.vec3(-1, 1);
            b.scale = rng.vec3(0.5, 1.5);
        }
        return p;
    };
    for (std::size_t b = 0; b < bones; ++b) {
        a.bones.push_back("bone" + std::to_string(b));
    }
    a.rest = pose();
    a.viseme_labels = default_viseme_labels(visemes);
    for (std::size_t i = 0; i < visemes; ++i) {
        a.viseme_poses.push_back(pose());
    }
    return a;
}

}  // namespace

TEST(TextIo, FormatDoubleRoundTrips)
{
    test::Rng rng(1);
    for (int k = 0; k < 1000; ++k) {
        const double v = rng.uniform(-1e6, 1e6) * std::pow(10.0, rng.integer(-12, 4));
        EXPECT_EQ(parse_double(format_double(v), "v"), v);
    }
    EXPECT_EQ(format_fixed(-0.0, 6), "0.000000");
    EXPECT_EQ(format_fixed(1.0, 6), "1.000000");
    EXPECT_THROW(parse_double("1.5x", "v"), ParseError);
    EXPECT_THROW(parse_int("", "v"), ParseError);
}

TEST(TextIo, KeyValueFile)
{
    const auto kv = KeyValueFile::parse("# c\na = 1\n\nb=two\na=3\n");
    ASSERT_EQ(kv.entries().size(), 3u);
    EXPECT_EQ(kv.get("b"), "two");
    EXPECT_EQ(kv.get_double("missing", 2.5), 2.5);
    EXPECT_EQ(kv.entries()[2].line, 5u);
    EXPECT_THROW(KeyValueFile::parse("novalue\n"), ParseError);
}

TEST(CurveIo, OneSerializesWithSixDecimals)
{
    Curve c(30, {"MBP", "SSS"}, 1);
    c.frames[0] = {1.0, 0.25};
    EXPECT_EQ(serialize_curve(c), "# fps=30\nframe,MBP,SSS\n0,1.000000,0.250000\n");
}

TEST(CurveIo, RoundTripAtDeclaredPrecision)
{
    test::Rng rng(2);
    for (int trial = 0; trial < 50; ++trial) {
        auto c = random_curve(rng, static_cast<std::size_t>(rng.integer(0, 40)), 16, rng.integer(1, 60));
        for (auto& row : c.frames) {
            for (auto& v : row) {
                v = std::round(v * 1e6) / 1e6;
            }
        }
        const auto text = serialize_curve(c);
        const auto back = parse_curve(text);
        EXPECT_EQ(serialize_curve(back), text);
        EXPECT_EQ(back.labels, c.labels);
        for (std::size_t j = 0; j < c.frame_count(); ++j) {
            for (std::size_t i = 0; i < 16; ++i) {
                EXPECT_NEAR(back.frames[j][i], c.frames[j][i], 5e-7);
            }
        }
    }
}

TEST(CurveIo, FileRoundTripAndErrors)
{
    const auto dir = test::temp_dir("curve_io");
    Curve c(24, {"A"}, 2);
    c.frames = {{0.5}, {0.125}};
    write_curve(dir / "c.csv", c);
    EXPECT_EQ(read_curve(dir / "c.csv"), c);
    EXPECT_THROW(read_curve(dir / "missing.csv"), IoError);
    EXPECT_THROW(parse_curve("frame,A\n1,0.5\n"), ParseError);
    EXPECT_THROW(parse_curve("frame,A\n0,0.5,0.1\n"), ParseError);
    c.frames[0][0] = std::nan("");
    EXPECT_THROW(serialize_curve(c), NumericError);
}

TEST(Resample, Examples)
{
    Curve c(10, {"A"}, 2);
    c.frames = {{0.0}, {1.0}};
    EXPECT_EQ(resample_curve(c, 10), c);
    EXPECT_DOUBLE_EQ(sample_curve_at(c, 0.1)[0], 0.5);
    const auto up = resample_curve(c, 20);
    ASSERT_EQ(up.frame_count(), 4u);
    EXPECT_DOUBLE_EQ(up.frames[0][0], 0.0);
    EXPECT_DOUBLE_EQ(up.frames[1][0], 0.25);
    EXPECT_DOUBLE_EQ(up.frames[2][0], 0.75);
    EXPECT_DOUBLE_EQ(up.frames[3][0], 1.0);

    Curve one(30, {"A", "B"}, 1);
    one.frames = {{0.3, 0.7}};
    for (double fps : {7.0, 24.0, 120.0}) {
        const auto r = resample_curve(one, fps);
        for (const auto& row : r.frames) {
            EXPECT_EQ(row, one.frames[0]);
        }
    }
    EXPECT_THROW(resample_curve(Curve(30, {"A"}, 0), 24), DimensionError);
    EXPECT_THROW(resample_curve(one, 0), ConfigError);
}

TEST(Resample, RoundTripThroughTripleRate)
{
    test::Rng rng(3);
    for (int trial = 0; trial < 50; ++trial) {
        const double fps = rng.integer(5, 60);
        const auto c = random_curve(rng, static_cast<std::size_t>(rng.integer(1, 50)), 4, fps);
        const auto back = resample_curve(resample_curve(c, 3 * fps), fps);
        ASSERT_EQ(back.frame_count(), c.frame_count());
        for (std::size_t j = 0; j < c.frame_count(); ++j) {
            for (std::size_t i = 0; i < 4; ++i) {
                EXPECT_NEAR(back.frames[j][i], c.frames[j][i], 1e-9);
            }
        }
    }
}

TEST(Slerp, Examples)
{
    const Quat a = Quat::identity();
    const Quat b = Quat::from_axis_angle(Vec3::UnitZ(), std::numbers::pi / 2);
    EXPECT_LT(quat_gap(slerp(a, b, 0.0), a), 1e-12);
    EXPECT_LT(quat_gap(slerp(a, b, 1.0), b), 1e-12);
    EXPECT_LT(quat_gap(slerp(a, b, 0.5), Quat::from_axis_angle(Vec3::UnitZ(), std::numbers::pi / 4)), 1e-12);
    for (double t : {0.0, 0.3, 0.7, 1.0}) {
        EXPECT_LT(quat_gap(slerp(b, -b, t), b), 1e-12);
    }
    EXPECT_THROW(slerp(Quat{0, 0, 0, 0}, a, 0.5), NumericError);
}

TEST(Slerp, RandomProperties)
{
    test::Rng rng(4);
    for (int k = 0; k < 10000; ++k) {
        const Quat q0 = rng.unit_quat();
        const Quat q1 = rng.unit_quat();
        const double t = rng.uniform();
        const Quat q = slerp(q0, q1, t);
        EXPECT_NEAR(q.norm(), 1.0, 1e-9);
        EXPECT_LT(quat_gap(q, slerp(q1, q0, 1.0 - t)), 1e-9);
        EXPECT_LT(quat_gap(q, slerp(q0, -q1, t)), 1e-9);
    }
}

TEST(Bones, Examples)
{
    test::Rng rng(5);
    const auto assets = random_assets(rng, 4, 3);
    const std::vector<double> zero(3, 0.0);
    const auto rest = blend_bone_pose(assets, zero);
    for (std::size_t b = 0; b < 4; ++b) {
        EXPECT_EQ(rest[b].rotation.w, assets.rest[b].rotation.w);
        EXPECT_EQ(rest[b].rotation.z, assets.rest[b].rotation.z);
        EXPECT_EQ(rest[b].translation, assets.rest[b].translation);
        EXPECT_EQ(rest[b].scale, assets.rest[b].scale);
    }
    for (std::size_t i = 0; i < 3; ++i) {
        std::vector<double> w(3, 0.0);
        w[i] = 1.0;
        const auto p = blend_bone_pose(assets, w);
        for (std::size_t b = 0; b < 4; ++b) {
            EXPECT_EQ(quat_gap(p[b].rotation, assets.viseme_poses[i][b].rotation), 0.0);
            EXPECT_EQ(p[b].translation, assets.viseme_poses[i][b].translation);
            EXPECT_EQ(p[b].scale, assets.viseme_poses[i][b].scale);
        }
    }
    EXPECT_THROW(blend_bone_pose(assets, std::vector<double>(2, 0.0)), DimensionError);
}

TEST(Bones, PlusMinusTwentyDegrees)
{
    BonePoseAssets a;
    a.bones = {"jaw"};
    a.rest = {BoneTransform{Quat::identity(), Vec3(0, 0, 0), Vec3::Ones()}};
    a.viseme_labels = {"A", "B"};
    const double deg = std::numbers::pi / 9;
    a.viseme_poses = {{BoneTransform{Quat::from_axis_angle(Vec3::UnitZ(), deg), Vec3(1, 0, 0), Vec3::Ones()}},
                      {BoneTransform{Quat::from_axis_angle(Vec3::UnitZ(), -deg), Vec3(0, 2, 0), Vec3::Ones()}}};
    const std::vector<double> w{0.5, 0.5};
    const auto p = blend_bone_pose(a, w);
    EXPECT_NEAR(p[0].rotation.x, 0.0, 1e-15);
    EXPECT_NEAR(p[0].rotation.y, 0.0, 1e-15);
    EXPECT_LE(p[0].rotation.angle(), deg);
    EXPECT_EQ(p[0].translation, Vec3(0.5, 1.0, 0.0));
}

TEST(Bones, TranslationSuperposition)
{
    test::Rng rng(6);
    const auto assets = random_assets(rng, 3, 5);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> a(5), b(5), ab(5), zero(5, 0.0);
        for (std::size_t i = 0; i < 5; ++i) {
            a[i] = rng.uniform(0, 0.2);
            b[i] = rng.uniform(0, 0.2);
            ab[i] = a[i] + b[i];
        }
        const auto pa = blend_bone_pose(assets, a);
        const auto pb = blend_bone_pose(assets, b);
        const auto pab = blend_bone_pose(assets, ab);
        const auto p0 = blend_bone_pose(assets, zero);
        for (std::size_t k = 0; k < 3; ++k) {
            EXPECT_LT((pab[k].translation - (pa[k].translation + pb[k].translation - p0[k].translation)).norm(), 1e-12);
            EXPECT_LT((pab[k].scale - (pa[k].scale + pb[k].scale - p0[k].scale)).norm(), 1e-12);
            EXPECT_NEAR(pab[k].rotation.norm(), 1.0, 1e-12);
        }
    }
}

TEST(Bones, AssetTextRoundTrip)
{
    test::Rng rng(7);
    const auto assets = random_assets(rng, 3, 4);
    const auto text = serialize_bone_assets(assets);
    const auto back = parse_bone_assets(text, assets.viseme_labels);
    EXPECT_EQ(serialize_bone_assets(back), text);
    EXPECT_EQ(back.bones, assets.bones);
    EXPECT_THROW(parse_bone_assets("jaw,A,0,0,0,1,0,0,0,1,1,1\n"), Error);
    EXPECT_THROW(parse_bone_assets("jaw,rest,0,0,0,1,0,0,0,1,1\n"), ParseError);
}

TEST(Bake, ZeroCurveGivesNeutral)
{
    test::Rng rng(8);
    const auto rig = test::random_rig(rng, 4);
    const Curve c(30, rig.labels(), 1);
    const auto meshes = bake_mesh_sequence(rig, c);
    ASSERT_EQ(meshes.size(), 1u);
    EXPECT_EQ(meshes[0].vertices, rig.neutral().vertices);
    EXPECT_EQ(meshes[0].triangles, rig.neutral().triangles);
}

TEST(Bake, MatchesBlendPerFrame)
{
    test::Rng rng(9);
    const auto rig = test::random_rig(rng, 3);
    const auto c = random_curve(rng, 5, 3, 30);
    const auto meshes = bake_mesh_sequence(rig, c);
    ASSERT_EQ(meshes.size(), 5u);
    for (std::size_t j = 0; j < 5; ++j) {
        EXPECT_EQ(meshes[j].vertices, blend_mesh(rig, c.frames[j]).vertices);
    }
}
