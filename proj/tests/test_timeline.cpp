#include "support.hpp"

#include "viseme/error.hpp"
#include "viseme/timeline.hpp"

#include <gtest/gtest.h>

using namespace viseme;

namespace {

const std::vector<std::string> kLabels = default_viseme_labels(16);

PhonemeVisemeMap small_map() { return PhonemeVisemeMap::parse("m=MBP\nb=MBP\ns=SSS\nw=WWW\nsilence=sil sp\n", kLabels); }

}  // namespace

TEST(Alignment, SingleLine)
{
    const auto t = parse_alignment("m\t0.10\t0.25\n");
    ASSERT_EQ(t.segments.size(), 1u);
    EXPECT_EQ(t.segments[0], (PhonemeSegment{"m", 0.10, 0.25}));
    EXPECT_EQ(t.duration, 0.25);
}

TEST(Alignment, OverlapReportsBothLines)
{
    try {
        parse_alignment("a\t0.0\t0.2\nb\t0.1\t0.3\n", "clip.tsv");
        FAIL() << "expected an overlap error";
    } catch (const ParseError& e) {
        const std::string msg = e.what();
        EXPECT_NE(msg.find("1"), std::string::npos);
        EXPECT_NE(msg.find("2"), std::string::npos);
        EXPECT_NE(msg.find("overlap"), std::string::npos);
    }
}

TEST(Alignment, EmptyAndErrors)
{
    const auto t = parse_alignment("");
    EXPECT_TRUE(t.segments.empty());
    EXPECT_EQ(t.duration, 0.0);
    EXPECT_THROW(parse_alignment("a\tzero\t0.2\n"), ParseError);
    EXPECT_THROW(parse_alignment("a\t0.3\t0.2\n"), ParseError);
    EXPECT_THROW(parse_alignment("a\t0.2\t0.2\n"), ParseError);
    EXPECT_THROW(parse_alignment("a\t0.2\n"), ParseError);
}

TEST(Alignment, SortsAndSkipsComments)
{
    const auto t = parse_alignment("# words\nb\t0.5\t0.7\na\t0.0\t0.5\n");
    ASSERT_EQ(t.segments.size(), 2u);
    EXPECT_EQ(t.segments[0].phoneme, "a");
    EXPECT_EQ(t.segments[1].phoneme, "b");
}

TEST(Alignment, RoundTripRandom)
{
    test::Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        Timeline t;
        double cursor = rng.uniform(0, 0.1);
        const int n = rng.integer(0, 20);
        for (int k = 0; k < n; ++k) {
            const double start = cursor + rng.uniform(0, 0.05);
            const double end = start + rng.uniform(0.01, 0.3);
            t.segments.push_back({"p" + std::to_string(rng.integer(0, 40)), start, end});
            cursor = end;
        }
        t.duration = t.segments.empty() ? 0.0 : t.segments.back().end;
        EXPECT_EQ(parse_alignment(serialize_alignment(t)), t);
    }
}

TEST(Map, LooksUpVisemes)
{
    const auto map = small_map();
    EXPECT_EQ(viseme_of("m", map), 0u);
    EXPECT_EQ(viseme_of("s", map), 1u);
    EXPECT_FALSE(viseme_of("sil", map));
    EXPECT_TRUE(map.is_silence("sp"));
    try {
        viseme_of("qqq", map);
        FAIL() << "expected an unmapped phoneme error";
    } catch (const UnmappedPhonemeError& e) {
        EXPECT_EQ(e.token(), "qqq");
        EXPECT_NE(std::string(e.what()).find("qqq"), std::string::npos);
    }
}

TEST(Map, RejectsUnknownLabel) { EXPECT_THROW(PhonemeVisemeMap::parse("m=XYZ\n", kLabels), ParseError); }

TEST(Frames, Examples)
{
    Timeline full{{{"m", 0.0, 1.0}}, 1.0};
    const auto a = sample_frames(full, 4);
    ASSERT_EQ(a.size(), 4u);
    for (const auto& f : a) {
        EXPECT_EQ(f, "m");
    }

    Timeline empty{{}, 0.5};
    const auto b = sample_frames(empty, 4);
    ASSERT_EQ(b.size(), 2u);
    EXPECT_FALSE(b[0]);
    EXPECT_FALSE(b[1]);

    Timeline gap{{{"a", 0.0, 0.25}}, 0.5};
    const auto c = sample_frames(gap, 4);
    ASSERT_EQ(c.size(), 2u);
    EXPECT_EQ(c[0], "a");
    EXPECT_FALSE(c[1]);
}

TEST(Frames, LengthIsCeilOfDurationTimesFps)
{
    EXPECT_EQ(frame_count(100.0 / 30.0, 30.0), 100u);
    EXPECT_EQ(frame_count(1.01, 10.0), 11u);
    EXPECT_EQ(frame_count(0.0, 30.0), 0u);
    test::Rng rng(9);
    for (int k = 0; k < 500; ++k) {
        const double d = rng.uniform(0, 10);
        const double fps = rng.integer(1, 120);
        Timeline t{{}, d};
        EXPECT_EQ(sample_frames(t, fps).size(), static_cast<std::size_t>(std::ceil(d * fps - 1e-9)));
    }
}

TEST(Frames, FpsDoesNotChangeCoverageAtAGivenTime)
{
    // Frame centers of 10 fps coincide with every third center at 30 fps.
    test::Rng rng(10);
    for (int trial = 0; trial < 100; ++trial) {
        Timeline t;
        double cursor = 0.0;
        for (int k = 0; k < 8; ++k) {
            const double start = cursor + (rng.uniform() < 0.3 ? rng.uniform(0.0, 0.2) : 0.0);
            const double end = start + rng.uniform(0.03, 0.4);
            t.segments.push_back({"p" + std::to_string(k), start, end});
            cursor = end;
        }
        t.duration = cursor;
        const auto coarse = sample_frames(t, 10);
        const auto fine = sample_frames(t, 30);
        for (std::size_t j = 0; j < coarse.size(); ++j) {
            if (3 * j + 1 >= fine.size()) {
                break;
            }
            EXPECT_EQ(coarse[j], fine[3 * j + 1]);
        }
    }
}
