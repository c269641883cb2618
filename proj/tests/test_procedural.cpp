#include "support.hpp"

#include "viseme/error.hpp"
#include "viseme/procedural.hpp"

#include <gtest/gtest.h>

using namespace viseme;

namespace {

const std::vector<std::string> kLabels = default_viseme_labels(16);

PhonemeVisemeMap map16()
{
    return PhonemeVisemeMap::parse("m=MBP\nb=MBP\np=MBP\ns=SSS\nw=WWW\na=V10\ne=V11\no=V13\nsilence=sil\n", kLabels);
}

}  // namespace

TEST(Envelope, MidpointIsApex)
{
    EnvelopeRule r;
    EXPECT_EQ(envelope(0.5, 1.0, r), 1.0);
    r.apex_amplitude = 0.8;
    EXPECT_EQ(envelope(0.5, 1.0, r), 0.8);
}

TEST(Envelope, OutsideSupportIsZero)
{
    EnvelopeRule r;
    const double d = 0.4;
    const double onset = r.onset_duration(d);
    const double offset = r.offset_duration(d);
    EXPECT_EQ(envelope(-onset - 1e-6, d, r), 0.0);
    EXPECT_EQ(envelope(d + offset + 1e-6, d, r), 0.0);
    EXPECT_EQ(envelope(-onset, d, r), 0.0);
    EXPECT_EQ(envelope(0.0, d, r), r.apex_amplitude);
    EXPECT_EQ(envelope(d, d, r), r.apex_amplitude);
    EXPECT_EQ(envelope(d + offset, d, r), 0.0);
}

TEST(Envelope, WindowsClampToLimits)
{
    EnvelopeRule r;
    EXPECT_DOUBLE_EQ(r.onset_duration(0.04), 0.04);
    EXPECT_DOUBLE_EQ(r.onset_duration(0.4), 0.1);
    EXPECT_DOUBLE_EQ(r.onset_duration(2.0), 0.12);
    EXPECT_DOUBLE_EQ(r.offset_duration(2.0), 0.12);
}

TEST(Envelope, SmoothstepShape)
{
    EXPECT_EQ(smoothstep(0.0), 0.0);
    EXPECT_EQ(smoothstep(1.0), 1.0);
    EXPECT_EQ(smoothstep(0.5), 0.5);
    EXPECT_EQ(smoothstep(-1.0), 0.0);
    EXPECT_EQ(smoothstep(2.0), 1.0);
}

TEST(Rules, ParseAndValidate)
{
    const auto rules = ProceduralRules::parse("onset_frac=0.2\nmin_onset_ms=30\napex.SSS=0.6\ndefault_apex=0.7\n");
    EXPECT_DOUBLE_EQ(rules.timing.onset_frac, 0.2);
    EXPECT_DOUBLE_EQ(rules.timing.min_onset, 0.03);
    EXPECT_DOUBLE_EQ(rules.rule_for("SSS").apex_amplitude, 0.6);
    EXPECT_DOUBLE_EQ(rules.rule_for("MBP").apex_amplitude, 1.0);
    EXPECT_DOUBLE_EQ(rules.rule_for("V05").apex_amplitude, 0.7);
    EXPECT_THROW(ProceduralRules::parse("onset_frac=0.7\noffset_frac=0.6\n"), ConfigError);
    EXPECT_THROW(ProceduralRules::parse("apex.MBP=1.5\n"), ConfigError);
    EXPECT_THROW(ProceduralRules::parse("bogus=1\n"), ParseError);
}

TEST(Procedural, EmptyTimelineIsAllZero)
{
    const auto c = generate_procedural(Timeline{{}, 1.0}, 10, map16(), kLabels, ProceduralRules{});
    ASSERT_EQ(c.frame_count(), 10u);
    for (const auto& row : c.frames) {
        for (double v : row) {
            EXPECT_EQ(v, 0.0);
        }
    }
}

TEST(Procedural, SingleSegmentPlateausAtApex)
{
    const auto c = generate_procedural(Timeline{{{"m", 0.0, 1.0}}, 1.0}, 10, map16(), kLabels, ProceduralRules{});
    ASSERT_EQ(c.frame_count(), 10u);
    for (std::size_t j = 3; j <= 6; ++j) {
        EXPECT_EQ(c.frames[j][0], 1.0);
    }
    for (const auto& row : c.frames) {
        for (std::size_t i = 1; i < 16; ++i) {
            EXPECT_EQ(row[i], 0.0);
        }
    }
}

TEST(Procedural, OverlapUsesMaxNotSum)
{
    // Two MBP segments separated by a short gap: their extensions overlap.
    const Timeline t{{{"m", 0.0, 0.3}, {"b", 0.35, 0.7}}, 0.8};
    ProceduralRules rules;
    const auto c = generate_procedural(t, 100, map16(), kLabels, rules);
    const auto rule = rules.rule_for("MBP");
    for (std::size_t j = 0; j < c.frame_count(); ++j) {
        const double tc = (j + 0.5) / 100.0;
        const double a = envelope(tc - 0.0, 0.3, rule);
        const double b = envelope(tc - 0.35, 0.35, rule);
        EXPECT_EQ(c.frames[j][0], std::max(a, b));
        EXPECT_LE(c.frames[j][0], 1.0);
    }
}

TEST(Procedural, UnmappedPhonemePropagates)
{
    EXPECT_THROW(generate_procedural(Timeline{{{"qqq", 0.0, 0.5}}, 0.5}, 30, map16(), kLabels, ProceduralRules{}),
                 UnmappedPhonemeError);
}

namespace {

Timeline random_timeline(test::Rng& rng, double min_dur)
{
    static const char* tokens[] = {"m", "b", "s", "w", "a", "e", "o", "sil"};
    Timeline t;
    double cursor = 0.0;
    for (int k = 0; k < 12; ++k) {
        const double start = cursor + (rng.uniform() < 0.3 ? rng.uniform(0.0, 0.1) : 0.0);
        const double end = start + rng.uniform(min_dur, 0.35);
        t.segments.push_back({tokens[rng.integer(0, 7)], start, end});
        cursor = end;
    }
    t.duration = cursor + 0.1;
    return t;
}

}  // namespace

TEST(Procedural, ValuesInUnitRangeAndApexReached)
{
    test::Rng rng(21);
    const auto map = map16();
    ProceduralRules rules;
    for (int trial = 0; trial < 100; ++trial) {
        const double fps = rng.integer(10, 60);
        const auto t = random_timeline(rng, 2.0 / fps);
        const auto c = generate_procedural(t, fps, map, kLabels, rules);
        for (const auto& row : c.frames) {
            for (double v : row) {
                EXPECT_GE(v, 0.0);
                EXPECT_LE(v, 1.0);
            }
        }
        for (const auto& seg : t.segments) {
            const auto idx = map.viseme_of(seg.phoneme);
            if (!idx) {
                continue;
            }
            const double center = 0.5 * (seg.start + seg.end);
            const auto j = static_cast<std::size_t>(std::clamp(std::round(center * fps - 0.5), 0.0,
                                                               static_cast<double>(c.frame_count() - 1)));
            EXPECT_GE(c.frames[j][*idx], 0.99 * rules.rule_for(kLabels[*idx]).apex_amplitude);
        }
    }
}

TEST(Procedural, CoincidentFrameCentersAgreeAcrossFps)
{
    // Frame centers at fps and 3*fps coincide every third fine frame.
    test::Rng rng(22);
    const auto map = map16();
    for (int trial = 0; trial < 50; ++trial) {
        const auto t = random_timeline(rng, 0.03);
        const double fps = rng.integer(10, 40);
        const auto coarse = generate_procedural(t, fps, map, kLabels, ProceduralRules{});
        const auto fine = generate_procedural(t, 3 * fps, map, kLabels, ProceduralRules{});
        for (std::size_t j = 0; j < coarse.frame_count() && 3 * j + 1 < fine.frame_count(); ++j) {
            for (std::size_t i = 0; i < 16; ++i) {
                EXPECT_NEAR(coarse.frames[j][i], fine.frames[3 * j + 1][i], 1e-12);
            }
        }
    }
}
