#include "support.hpp"

#include "viseme/error.hpp"
#include "viseme/mesh.hpp"
#include "viseme/rig.hpp"
#include "viseme/text_io.hpp"

#include <gtest/gtest.h>

using namespace viseme;

namespace {

const char* kTri = "v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 2 3\n";

Mesh tri(double dz = 0.0)
{
    Mesh m = parse_obj(kTri);
    for (auto& v : m.vertices) {
        v.z() += dz;
    }
    return m;
}

}  // namespace

TEST(Obj, ParsesSubsetWithColorsAndComments)
{
    const auto m = parse_obj("# head\nv 1 2 3 0.1 0.2 0.3\nv 4 5 6 1 0 0\nv 7 8 9 0 1 0\n\nf 1 2 3\n");
    ASSERT_EQ(m.vertices.size(), 3u);
    EXPECT_EQ(m.vertices[1], Vec3(4, 5, 6));
    ASSERT_TRUE(m.has_colors());
    EXPECT_EQ(m.colors[0], Vec3(0.1, 0.2, 0.3));
    ASSERT_EQ(m.triangles.size(), 1u);
    EXPECT_EQ(m.triangles[0], (Triangle{0, 1, 2}));
}

TEST(Obj, RejectsOtherDirectivesAndBadFaces)
{
    EXPECT_THROW(parse_obj("v 0 0 0\nvn 0 0 1\n"), ParseError);
    EXPECT_THROW(parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3 4\n"), ParseError);
    EXPECT_THROW(parse_obj("v 0 0\n"), ParseError);
    EXPECT_THROW(parse_obj("v 0 0 x\n"), ParseError);
    EXPECT_THROW(parse_obj("v 0 0 0\nf 1 2 3\n"), TopologyError);
    EXPECT_THROW(parse_obj("v 0 0 0 1 1 1\nv 0 0 0\n"), ParseError);
}

TEST(Obj, RoundTripIsExact)
{
    test::Rng rng(3);
    Mesh m;
    for (int k = 0; k < 50; ++k) {
        m.vertices.push_back(rng.vec3(-100, 100));
        m.colors.push_back(rng.vec3(0, 1));
    }
    for (std::uint32_t k = 0; k + 2 < 50; ++k) {
        m.triangles.push_back({k, k + 1, k + 2});
    }
    const auto text = serialize_obj(m);
    const auto back = parse_obj(text);
    EXPECT_EQ(back.vertices, m.vertices);
    EXPECT_EQ(back.colors, m.colors);
    EXPECT_EQ(back.triangles, m.triangles);
    EXPECT_EQ(serialize_obj(back), text);
}

TEST(Rig, MinimalRigIsValid)
{
    Rig rig(tri(), {tri(0.5)}, {"MBP"});
    EXPECT_EQ(rig.viseme_count(), 1u);
    EXPECT_EQ(rig.vertex_count(), 3u);
}

TEST(Rig, TopologyMismatchRejected)
{
    Mesh four = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nv 1 1 0\nf 1 2 3\n");
    EXPECT_THROW(Rig(tri(), {four}, {"MBP"}), TopologyError);
    Mesh other_faces = parse_obj("v 0 0 0\nv 1 0 0\nv 0 1 0\nf 1 3 2\n");
    EXPECT_THROW(Rig(tri(), {other_faces}, {"MBP"}), TopologyError);
}

TEST(Rig, DuplicateLabelsAndBadBindingsRejected)
{
    EXPECT_THROW(Rig(tri(), {tri(1), tri(2)}, {"A", "A"}), ConfigError);
    EXPECT_THROW(Rig(tri(), {tri(1)}, {"A", "B"}), DimensionError);
    EXPECT_THROW(Rig(tri(), {}, {}), ConfigError);
    EXPECT_THROW(Rig(tri(), {tri(1)}, {"A"}, {{0, 7}}), TopologyError);
}

TEST(Rig, IdenticalVisemeHasZeroDelta)
{
    Rig rig(tri(), {tri()}, {"MBP"});
    for (double d : rig.deltas_flat()) {
        EXPECT_EQ(d, 0.0);
    }
}

TEST(Blend, ZeroOneHotAndHalf)
{
    test::Rng rng(11);
    const auto rig = test::random_rig(rng, 6);
    const std::vector<double> zero(6, 0.0);
    EXPECT_EQ(blend_mesh(rig, zero).vertices, rig.neutral().vertices);
    for (std::size_t i = 0; i < 6; ++i) {
        std::vector<double> w(6, 0.0);
        w[i] = 1.0;
        EXPECT_EQ(blend_mesh(rig, w).vertices, rig.visemes()[i].vertices);
        w[i] = 0.5;
        const auto half = blend_mesh(rig, w);
        for (std::size_t k = 0; k < rig.vertex_count(); ++k) {
            const Vec3 mid = 0.5 * (rig.neutral().vertices[k] + rig.visemes()[i].vertices[k]);
            EXPECT_LT((half.vertices[k] - mid).norm(), 1e-15);
        }
    }
    EXPECT_EQ(blend_mesh(rig, zero).triangles, rig.neutral().triangles);
    EXPECT_THROW(blend_mesh(rig, std::vector<double>(5, 0.0)), DimensionError);
}

TEST(Blend, LinearityAndRepeatability)
{
    test::Rng rng(12);
    const auto rig = test::random_rig(rng, 8);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<double> w1(8), w2(8), mix(8);
        const double a = rng.uniform();
        for (int i = 0; i < 8; ++i) {
            w1[i] = rng.uniform();
            w2[i] = rng.uniform();
            mix[i] = a * w1[i] + (1 - a) * w2[i];
        }
        const auto m1 = blend_mesh(rig, w1);
        const auto m2 = blend_mesh(rig, w2);
        const auto mm = blend_mesh(rig, mix);
        for (std::size_t k = 0; k < rig.vertex_count(); ++k) {
            EXPECT_LT((mm.vertices[k] - (a * m1.vertices[k] + (1 - a) * m2.vertices[k])).norm(), 1e-12);
        }
        EXPECT_EQ(blend_mesh(rig, mix).vertices, mm.vertices);
    }
}

TEST(Rig, ManifestRoundTrip)
{
    test::Rng rng(5);
    const auto rig = test::random_rig(rng, 4);
    const Rig with_lips(rig.neutral(), rig.visemes(), rig.labels(), rig.bindings(), LipPairs{{0, 4}, {2, 7}},
                        rig.mouth_landmarks());
    const auto dir = test::temp_dir("rig_manifest");
    const auto manifest = save_rig(with_lips, dir);
    const auto back = load_rig_manifest(manifest);
    EXPECT_EQ(back.labels(), with_lips.labels());
    EXPECT_EQ(back.neutral().vertices, with_lips.neutral().vertices);
    EXPECT_EQ(back.neutral().colors, with_lips.neutral().colors);
    for (std::size_t i = 0; i < 4; ++i) {
        EXPECT_EQ(back.visemes()[i].vertices, with_lips.visemes()[i].vertices);
    }
    ASSERT_EQ(back.bindings().size(), with_lips.bindings().size());
    for (std::size_t k = 0; k < back.bindings().size(); ++k) {
        EXPECT_EQ(back.bindings()[k].landmark_id, with_lips.bindings()[k].landmark_id);
        EXPECT_EQ(back.bindings()[k].vertex, with_lips.bindings()[k].vertex);
    }
    EXPECT_EQ(back.mouth_landmarks(), with_lips.mouth_landmarks());
    ASSERT_TRUE(back.lip_pairs());
    EXPECT_EQ(back.lip_pairs()->vertical, (std::array<std::uint32_t, 2>{2, 7}));
}

TEST(Rig, LoadRigFromFiles)
{
    const auto dir = test::temp_dir("rig_files");
    write_obj(dir / "n.obj", tri());
    write_obj(dir / "a.obj", tri(0.1));
    const auto rig = load_rig(dir / "n.obj", {dir / "a.obj"}, {"MBP"}, {{3, 1}});
    EXPECT_EQ(rig.vertex_for_landmark(3), 1u);
    EXPECT_FALSE(rig.vertex_for_landmark(4));
    write_file_atomic(dir / "b.obj", "v 0 0 0\nv 1 0 0\nv 0 1 0\nv 2 2 2\nf 1 2 3\n");
    EXPECT_THROW(load_rig(dir / "n.obj", {dir / "b.obj"}, {"MBP"}, {}), TopologyError);
    EXPECT_THROW(load_rig(dir / "n.obj", {dir / "missing.obj"}, {"MBP"}, {}), IoError);
}

TEST(Rig, DefaultLabels)
{
    const auto labels = default_viseme_labels();
    ASSERT_EQ(labels.size(), 16u);
    EXPECT_EQ(labels[0], "MBP");
    EXPECT_EQ(labels[1], "SSS");
    EXPECT_EQ(labels[2], "WWW");
    EXPECT_EQ(labels[3], "V03");
    EXPECT_EQ(labels[15], "V15");
}
