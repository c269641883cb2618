#include "viseme/procedural.hpp"

#include "viseme/error.hpp"
#include "viseme/text_io.hpp"

#include <algorithm>
#include <cmath>

namespace viseme {

double EnvelopeRule::onset_duration(double seg_duration) const
{
    return std::clamp(onset_frac * seg_duration, min_onset, max_onset);
}

double EnvelopeRule::offset_duration(double seg_duration) const
{
    return std::clamp(offset_frac * seg_duration, min_offset, max_offset);
}

void EnvelopeRule::validate() const
{
    if (onset_frac < 0.0 || offset_frac < 0.0 || onset_frac + offset_frac > 1.0) {
        throw ConfigError("onset_frac and offset_frac must be non-negative with a sum of at most 1");
    }
    if (!(apex_amplitude > 0.0) || apex_amplitude > 1.0) {
        throw ConfigError("apex amplitude must lie in (0, 1]");
    }
    if (!(min_onset > 0.0) || !(min_offset > 0.0) || max_onset < min_onset || max_offset < min_offset) {
        throw ConfigError("onset/offset bounds must satisfy 0 < min <= max");
    }
}

double smoothstep(double t) noexcept
{
    t = std::clamp(t, 0.0, 1.0);
    return t * t * (3.0 - 2.0 * t);
}

double envelope(double t_rel, double seg_duration, const EnvelopeRule& rule)
{
    if (!(seg_duration > 0.0)) {
        throw ConfigError("segment duration must be positive");
    }
    const double onset = rule.onset_duration(seg_duration);
    const double offset = rule.offset_duration(seg_duration);
    if (t_rel <= -onset || t_rel >= seg_duration + offset) {
        return 0.0;
    }
    if (t_rel < 0.0) {
        return rule.apex_amplitude * smoothstep((t_rel + onset) / onset);
    }
    if (t_rel <= seg_duration) {
        return rule.apex_amplitude;
    }
    return rule.apex_amplitude * (1.0 - smoothstep((t_rel - seg_duration) / offset));
}

EnvelopeRule ProceduralRules::rule_for(std::string_view viseme_label) const
{
    EnvelopeRule r = timing;
    const auto it = apex_overrides.find(std::string(viseme_label));
    r.apex_amplitude = it != apex_overrides.end() ? it->second : default_apex;
    return r;
}

ProceduralRules ProceduralRules::parse(std::string_view text, std::string_view source_name)
{
    const auto kv = KeyValueFile::parse(text, source_name);
    ProceduralRules rules;
    for (const auto& e : kv.entries()) {
        const auto where = kv.source_name() + ":" + std::to_string(e.line);
        const double v = parse_double(e.value, where);
        if (e.key == "onset_frac") {
            rules.timing.onset_frac = v;
        } else if (e.key == "offset_frac") {
            rules.timing.offset_frac = v;
        } else if (e.key == "min_onset_ms") {
            rules.timing.min_onset = v / 1000.0;
        } else if (e.key == "min_offset_ms") {
            rules.timing.min_offset = v / 1000.0;
        } else if (e.key == "max_onset_ms") {
            rules.timing.max_onset = v / 1000.0;
        } else if (e.key == "max_offset_ms") {
            rules.timing.max_offset = v / 1000.0;
        } else if (e.key == "default_apex") {
            rules.default_apex = v;
        } else if (e.key.rfind("apex.", 0) == 0 && e.key.size() > 5) {
            rules.apex_overrides[e.key.substr(5)] = v;
        } else {
            throw ParseError(where + ": unknown rules key '" + e.key + "'");
        }
    }
    rules.timing.validate();
    EnvelopeRule probe = rules.timing;
    probe.apex_amplitude = rules.default_apex;
    probe.validate();
    for (const auto& [label, apex] : rules.apex_overrides) {
        probe.apex_amplitude = apex;
        probe.validate();
    }
    return rules;
}

ProceduralRules ProceduralRules::load(const std::filesystem::path& path)
{
    return parse(read_text_file(path), path.string());
}

Curve generate_procedural(const Timeline& timeline, double fps, const PhonemeVisemeMap& map,
                          std::span<const std::string> labels, const ProceduralRules& rules,
                          std::optional<std::size_t> frames)
{
    if (labels.size() != map.viseme_count()) {
        throw DimensionError("phoneme map and label list disagree on the viseme count");
    }
    const auto n = frames.value_or(frame_count(timeline.duration, fps));
    Curve curve(fps, std::vector<std::string>(labels.begin(), labels.end()), n);

    for (const auto& seg : timeline.segments) {
        const auto idx = map.viseme_of(seg.phoneme);
        if (!idx) {
            continue;
        }
        const auto rule = rules.rule_for(labels[*idx]);
        const double d = seg.end - seg.start;
        const double lo = seg.start - rule.onset_duration(d);
        const double hi = seg.end + rule.offset_duration(d);
        // Only frames whose center lies inside the support can be non-zero.
        const auto first = static_cast<std::size_t>(std::max(0.0, std::floor(lo * fps - 0.5)));
        for (std::size_t j = first; j < n; ++j) {
            const double t = (static_cast<double>(j) + 0.5) / fps;
            if (t >= hi) {
                break;
            }
            auto& cell = curve.frames[j][*idx];
            cell = std::max(cell, envelope(t - seg.start, d, rule));
        }
    }
    return curve;
}

}  // namespace viseme
