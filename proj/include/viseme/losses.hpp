#pragma once

#include "viseme/camera.hpp"
#include "viseme/fit_config.hpp"
#include "viseme/guidance.hpp"
#include "viseme/observation.hpp"
#include "viseme/rig.hpp"

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace viseme {

/// Free variables of one frame: viseme weights and the rigid head pose.
struct FrameParams {
    std::vector<double> weights;
    Quat rotation;
    Vec3 translation = Vec3::Zero();

    Pose pose(const Intrinsics& k) const { return Pose{rotation, translation, k}; }
    static FrameParams from_pose(std::vector<double> weights, const Pose& pose)
    {
        return {std::move(weights), pose.rotation, pose.translation};
    }
};

/// Gradient over FrameParams. The rotation part is projected onto the tangent
/// space of the unit quaternion sphere at the current rotation.
struct FrameGradient {
    std::vector<double> weights;
    std::array<double, 4> rotation{};  ///< (w, x, y, z)
    Vec3 translation = Vec3::Zero();

    FrameGradient() = default;
    explicit FrameGradient(std::size_t viseme_count) : weights(viseme_count, 0.0) {}

    /// [weights..., qw, qx, qy, qz, tx, ty, tz]
    std::vector<double> flatten() const;
};

/// Parameter layout matching FrameGradient::flatten().
std::vector<double> flatten(const FrameParams& p);
FrameParams unflatten(std::span<const double> flat, std::size_t viseme_count);

struct ResolvedLandmark {
    std::uint32_t vertex = 0;
    Vec2 target = Vec2::Zero();
    double beta = 1.0;
};

/// Where a vertex should project this frame: previous projection plus flow.
struct FlowTarget {
    std::uint32_t vertex = 0;
    Vec2 target = Vec2::Zero();
};

/// Unweighted values of the seven loss terms.
struct LossTerms {
    double lmk = 0.0;
    double rgb = 0.0;
    double sup = 0.0;
    double act = 0.0;
    double flow = 0.0;
    double diff = 0.0;
    double range = 0.0;

    double weighted(const LossWeights& w) const noexcept
    {
        return w.lmk * lmk + w.rgb * rgb + w.sup * sup + w.act * act + w.flow * flow + w.diff * diff +
               w.range * range;
    }
};

/// Everything the per-frame objective needs besides the free parameters.
/// Empty landmark, flow, or guidance lists and a null image make their terms
/// vanish; so does an image on which no vertex lands.
struct FrameProblem {
    const Rig* rig = nullptr;
    Intrinsics intrinsics;
    LossWeights weights;
    std::vector<ResolvedLandmark> landmarks;
    const Image* image = nullptr;
    GuidanceSets guidance;
    std::vector<FlowTarget> flow;
    std::optional<std::vector<double>> neighbor;  ///< weights of the temporal neighbor for L_diff
};

/// Reusable scratch buffers for repeated evaluation against one rig.
class FrameEvaluator {
public:
    explicit FrameEvaluator(const Rig& rig);

    /// Returns the unweighted terms; when `grad` is non-null it receives the
    /// gradient of the weighted total.
    LossTerms evaluate(const FrameProblem& problem, const FrameParams& params, FrameGradient* grad);

    /// Projection of every vertex under `params`; NaN for vertices behind the camera.
    std::span<const Vec2> project_all(const FrameParams& params, const Intrinsics& k);

private:
    const Rig& rig_;
    std::vector<double> model_;
    std::vector<Vec3> cam_;
    std::vector<Vec2> px_;
    std::vector<Vec2> dpx_;
    std::vector<double> adjoint_;
};

// Individual terms. Each returns the unweighted value and, when `grad` is
// non-null, adds that term's gradient into it.

/// Weighted mean squared reprojection error of bound landmarks. NaN betas count
/// as 1. Throws ConfigError when no observation has a bound id and
/// NumericError when a used vertex is behind the camera.
double loss_lmk(const Pose& pose, std::span<const double> w, const Rig& rig,
                std::span<const LandmarkObservation> landmarks, FrameGradient* grad = nullptr);

/// Mean squared RGB difference between bilinear image samples at projected
/// vertices and the vertex colors, over vertices landing inside the image.
/// Throws NumericError when none does.
double loss_rgb(const Pose& pose, std::span<const double> w, const Rig& rig, const Image& image,
                FrameGradient* grad = nullptr);

double loss_sup(std::span<const double> w, const GuidanceSets& sets, FrameGradient* grad = nullptr);
double loss_act(std::span<const double> w, const GuidanceSets& sets, FrameGradient* grad = nullptr);

/// Mean squared distance between current projections and previous projections
/// displaced by flow. The previous frame is held fixed.
double loss_flow(const Pose& pose, std::span<const double> w, const Pose& prev_pose,
                 std::span<const double> prev_w, const Rig& rig,
                 std::span<const FlowCorrespondence> correspondences, FrameGradient* grad = nullptr);

double loss_diff(std::span<const double> w, std::span<const double> neighbor, FrameGradient* grad = nullptr);
double loss_range(std::span<const double> w, FrameGradient* grad = nullptr);

double total_loss(const FrameProblem& problem, const FrameParams& params);
FrameGradient grad_total(const FrameProblem& problem, const FrameParams& params);

}  // namespace viseme
