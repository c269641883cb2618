#pragma once

#include "viseme/animation.hpp"
#include "viseme/camera.hpp"
#include "viseme/curve.hpp"
#include "viseme/fit_config.hpp"
#include "viseme/observation.hpp"
#include "viseme/procedural.hpp"
#include "viseme/rig.hpp"
#include "viseme/timeline.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace viseme {

struct SynthOptions {
    std::uint64_t seed = 7;
    std::size_t frames = 100;
    double fps = 30.0;
    double landmark_noise = 0.0;  ///< pixels, Gaussian sigma
    bool images = true;
    bool flow = true;
    /// SSS equals MBP on every landmark-bound vertex (differs elsewhere).
    bool ambiguous_sss = false;
    /// Replaces the random phoneme sequence: each token gets an equal share
    /// of the clip between short leading and trailing silences.
    std::vector<std::string> phonemes;
};

/// A self-contained benchmark clip generated from known weights and poses.
struct SynthClip {
    Rig rig;
    std::string map_text;
    PhonemeVisemeMap map;
    Timeline timeline;
    ProceduralRules rules;
    Curve procedural;
    Curve truth;
    std::vector<Pose> poses;
    std::vector<FrameObservation> observations;
    FitConfig config;
    BonePoseAssets bones;
};

constexpr int kSynthWidth = 640;
constexpr int kSynthHeight = 480;

/// Grid face rig with 16 visemes: MBP closes the lip gap, SSS narrows it and
/// widens the corners, WWW puckers, the rest are seeded local deformations.
Rig make_synth_rig(std::uint64_t seed, bool ambiguous_sss = false);

/// Phoneme-to-viseme table over the default 16 labels.
std::string synth_phoneme_map_text();

SynthClip make_synth_clip(const SynthOptions& opts);

/// Writes rig/, obs/, alignment.tsv, map.txt, fit.cfg, truth.csv,
/// truth_poses.csv, procedural.csv and bones.csv under `dir`.
void write_synth_clip(const SynthClip& clip, const std::filesystem::path& dir);

}  // namespace viseme
