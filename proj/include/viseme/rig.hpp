#pragma once

#include "viseme/mesh.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace viseme {

struct LandmarkBinding {
    int landmark_id = 0;
    std::uint32_t vertex = 0;
};

/// Vertex pairs whose horizontal and vertical separations track lip motion.
struct LipPairs {
    std::array<std::uint32_t, 2> horizontal{};
    std::array<std::uint32_t, 2> vertical{};
};

/// Neutral mesh plus V viseme blendshapes sharing its topology.
///
/// Immutable after construction. Geometry is also kept as flat xyz arrays so
/// the blend and its adjoint run through the vectorized kernels.
class Rig {
public:
    Rig(Mesh neutral, std::vector<Mesh> visemes, std::vector<std::string> labels,
        std::vector<LandmarkBinding> bindings = {}, std::optional<LipPairs> lips = std::nullopt,
        std::vector<int> mouth_landmarks = {});

    const Mesh& neutral() const noexcept { return neutral_; }
    const std::vector<Mesh>& visemes() const noexcept { return visemes_; }
    const std::vector<std::string>& labels() const noexcept { return labels_; }
    const std::vector<LandmarkBinding>& bindings() const noexcept { return bindings_; }
    const std::optional<LipPairs>& lip_pairs() const noexcept { return lips_; }
    const std::vector<int>& mouth_landmarks() const noexcept { return mouth_landmarks_; }

    std::size_t viseme_count() const noexcept { return visemes_.size(); }
    std::size_t vertex_count() const noexcept { return neutral_.vertices.size(); }

    std::optional<std::size_t> label_index(std::string_view label) const;
    std::optional<std::uint32_t> vertex_for_landmark(int landmark_id) const;
    bool is_mouth_landmark(int landmark_id) const;

    /// 3 * vertex_count values, xyz interleaved.
    std::span<const double> neutral_flat() const noexcept { return neutral_flat_; }
    /// V rows of 3 * vertex_count values (B_i).
    std::span<const double> shapes_flat() const noexcept { return shapes_flat_; }
    /// V rows of 3 * vertex_count values (B_i - B_0).
    std::span<const double> deltas_flat() const noexcept { return deltas_flat_; }

private:
    Mesh neutral_;
    std::vector<Mesh> visemes_;
    std::vector<std::string> labels_;
    std::vector<LandmarkBinding> bindings_;
    std::optional<LipPairs> lips_;
    std::vector<int> mouth_landmarks_;
    std::vector<double> neutral_flat_;
    std::vector<double> shapes_flat_;
    std::vector<double> deltas_flat_;
};

/// "MBP", "SSS", "WWW" followed by placeholders "V03".."V(count-1)".
std::vector<std::string> default_viseme_labels(std::size_t count = 16);

Rig load_rig(const std::filesystem::path& neutral_path, const std::vector<std::filesystem::path>& viseme_paths,
             std::vector<std::string> labels, std::vector<LandmarkBinding> bindings);

/// Reads a rig manifest:
///
///     neutral = neutral.obj
///     viseme = MBP viseme_00.obj        (one line per viseme, in order)
///     L<id> = <vertex_index>            (landmark bindings)
///     mouth_landmarks = 3 4 5
///     lip_horizontal = <a> <b>
///     lip_vertical = <c> <d>
///
/// Relative paths resolve against the manifest's directory.
Rig load_rig_manifest(const std::filesystem::path& manifest_path);

/// Writes neutral.obj, viseme_XX.obj and rig.txt into `dir`; returns the manifest path.
std::filesystem::path save_rig(const Rig& rig, const std::filesystem::path& dir);

/// S = B0 + sum_i w_i (B_i - B0); triangles and colors copied from the neutral.
Mesh blend_mesh(const Rig& rig, std::span<const double> weights);
/// Same blend into a flat xyz buffer of 3 * vertex_count values.
void blend_vertices(const Rig& rig, std::span<const double> weights, std::span<double> out);

}  // namespace viseme
