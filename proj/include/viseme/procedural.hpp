#pragma once

#include "viseme/curve.hpp"
#include "viseme/timeline.hpp"

#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace viseme {

/// Timing and amplitude of one viseme's activation around a phoneme segment.
///
/// The weight rises with a smoothstep over the onset window that ends at the
/// segment start, holds `apex_amplitude` for the whole segment, and falls with
/// a smoothstep over the offset window that begins at the segment end. Window
/// lengths are fractions of the segment duration clamped to [min, max].
struct EnvelopeRule {
    double onset_frac = 0.25;
    double offset_frac = 0.25;
    double apex_amplitude = 1.0;
    double min_onset = 0.040;  ///< seconds
    double min_offset = 0.040;
    double max_onset = 0.120;
    double max_offset = 0.120;

    double onset_duration(double seg_duration) const;
    double offset_duration(double seg_duration) const;
    /// Throws ConfigError when the fields break their invariants.
    void validate() const;
};

/// 3t^2 - 2t^3 on [0,1], clamped outside.
double smoothstep(double t) noexcept;

/// Weight at `t_rel` seconds after the segment start. Zero outside
/// [-onset, seg_duration + offset].
double envelope(double t_rel, double seg_duration, const EnvelopeRule& rule);

/// Timing shared by all visemes plus per-viseme apex amplitudes.
struct ProceduralRules {
    EnvelopeRule timing;
    double default_apex = 0.8;
    /// Lip-closure visemes peak at full weight unless overridden.
    std::map<std::string, double> apex_overrides{{"MBP", 1.0}};

    EnvelopeRule rule_for(std::string_view viseme_label) const;

    /// Keys `onset_frac`, `offset_frac`, `min_onset_ms`, `min_offset_ms`,
    /// `max_onset_ms`, `max_offset_ms`, `default_apex`, `apex.<label>`.
    static ProceduralRules parse(std::string_view text, std::string_view source_name = "<rules>");
    static ProceduralRules load(const std::filesystem::path& path);
};

/// Procedural viseme curve: each viseme takes the pointwise maximum of the
/// envelopes of all segments mapped to it, evaluated at frame centers.
/// `frames` overrides the frame count derived from the timeline duration.
Curve generate_procedural(const Timeline& timeline, double fps, const PhonemeVisemeMap& map,
                          std::span<const std::string> labels, const ProceduralRules& rules,
                          std::optional<std::size_t> frames = std::nullopt);

}  // namespace viseme
