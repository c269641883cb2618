#pragma once

#include "viseme/curve.hpp"
#include "viseme/fit_config.hpp"
#include "viseme/losses.hpp"
#include "viseme/observation.hpp"
#include "viseme/procedural.hpp"
#include "viseme/rig.hpp"
#include "viseme/timeline.hpp"

#include <functional>
#include <span>
#include <vector>

namespace viseme {

struct FitResult {
    Curve curve;                      ///< final weights, truncated to [0,1]
    std::vector<Pose> poses;          ///< per-frame head pose
    std::vector<LossTerms> final_terms;  ///< unweighted terms at each frame's final second-pass iterate
};

/// Observed landmarks bound to rig vertices; empty betas take the mouth or
/// default weight from the config.
std::vector<ResolvedLandmark> resolve_landmarks(const Rig& rig, std::span<const LandmarkObservation> observed,
                                                const FitConfig& cfg);

/// Rough first-frame pose: identity rotation with the translation that aligns
/// the centroid and spread of the bound vertices (blended with `weights`) to
/// the observations. Falls back to (0, 0, init_depth) with fewer than two landmarks.
Pose estimate_initial_pose(const Rig& rig, std::span<const double> weights,
                           std::span<const ResolvedLandmark> landmarks, const FitConfig& cfg);

/// Runs cfg.iters Adam iterations of the frame objective starting from `params`.
FrameParams optimize_frame(FrameEvaluator& evaluator, const FrameProblem& problem, FrameParams params,
                           const FitConfig& cfg, LossTerms* final_terms = nullptr);

/// Phoneme-guided fit of one clip against a precomputed procedural curve
/// (one row per observation). Pass 1 walks forward with flow and temporal
/// terms tied to frame j-1; pass 2 walks backward from the pass-1 solution
/// with the temporal term tied to frame j+1 and no flow. Weights are clamped
/// to [0,1] once at the end. NumericError is rethrown naming the frame.
FitResult fit_clip(const Rig& rig, const Curve& procedural, std::span<const FrameObservation> observations,
                   const FitConfig& cfg);

/// Builds the procedural curve from the timeline, then fits.
FitResult fit_clip(const Rig& rig, const Timeline& timeline, const PhonemeVisemeMap& map,
                   const ProceduralRules& rules, double fps, std::span<const FrameObservation> observations,
                   const FitConfig& cfg);

/// Per-frame pose CSV: `frame,qw,qx,qy,qz,tx,ty,tz`.
std::string serialize_poses(std::span<const Pose> poses);
std::vector<Pose> parse_poses(std::string_view text, const Intrinsics& k, std::string_view source_name = "<poses>");

}  // namespace viseme
