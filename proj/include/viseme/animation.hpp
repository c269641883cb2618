#pragma once

#include "viseme/curve.hpp"
#include "viseme/geometry.hpp"
#include "viseme/mesh.hpp"
#include "viseme/rig.hpp"

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace viseme {

/// Weights at time t (seconds), interpolating linearly between frame centers
/// (j + 0.5) / fps and clamping to the first and last frames.
std::vector<double> sample_curve_at(const Curve& curve, double t);

/// Curve at a new frame rate sampled at its frame centers. The output covers
/// the same duration: ceil(frames * fps_out / fps) frames.
Curve resample_curve(const Curve& curve, double fps_out);

/// Shortest-arc spherical interpolation of unit quaternions.
Quat slerp(const Quat& q0, const Quat& q1, double t);

/// Per-bone transform.
struct BoneTransform {
    Quat rotation;
    Vec3 translation = Vec3::Zero();
    Vec3 scale = Vec3::Ones();
};

/// One transform per bone, ordered like BonePoseAssets::bones.
using BonePose = std::vector<BoneTransform>;

struct BonePoseAssets {
    std::vector<std::string> bones;
    BonePose rest;
    std::vector<std::string> viseme_labels;
    std::vector<BonePose> viseme_poses;

    /// Throws DimensionError on inconsistent bone counts and ConfigError on
    /// non-unit rotations or non-positive scales.
    void validate() const;
};

/// Text lines `bone,pose_label,qx,qy,qz,qw,tx,ty,tz,sx,sy,sz`. The pose label
/// `rest` names the rest pose; other labels are taken in first-seen order
/// unless `labels` gives the required order. Every pose must list every bone.
BonePoseAssets parse_bone_assets(std::string_view text, std::span<const std::string> labels = {},
                                 std::string_view source_name = "<bones>");
std::string serialize_bone_assets(const BonePoseAssets& assets);
BonePoseAssets load_bone_assets(const std::filesystem::path& path, std::span<const std::string> labels = {});

/// Translation and scale: rest + sum_i w_i (pose_i - rest). Rotation: weighted
/// sum of rest (weight max(0, 1 - sum w)) and the viseme rotations, each sign
/// aligned with rest, then normalized. A near-zero sum falls back to rest.
BonePose blend_bone_pose(const BonePoseAssets& assets, std::span<const double> weights);

/// Same line format as the asset file with pose label `f<frame>`.
std::string serialize_bone_sequence(const BonePoseAssets& assets, std::span<const BonePose> frames);

/// blend_mesh for each frame of the curve.
std::vector<Mesh> bake_mesh_sequence(const Rig& rig, const Curve& curve);

}  // namespace viseme
