#pragma once

#include "viseme/geometry.hpp"

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace viseme {

using Triangle = std::array<std::uint32_t, 3>;

struct Mesh {
    std::vector<Vec3> vertices;
    std::vector<Triangle> triangles;
    /// Per-vertex RGB in [0,1]; empty when the source had no colors.
    std::vector<Vec3> colors;

    bool has_colors() const noexcept { return !colors.empty(); }
    /// Throws TopologyError on out-of-range indices or a color count mismatch.
    void validate() const;
};

/// Parses the OBJ subset: `v x y z [r g b]`, `f i j k` (1-based), `#` comments.
/// Any other directive is a ParseError.
Mesh parse_obj(std::string_view text, std::string_view source_name = "<obj>");
/// Coordinates are written with shortest round-trip precision.
std::string serialize_obj(const Mesh& mesh);

Mesh load_obj(const std::filesystem::path& path);
void write_obj(const std::filesystem::path& path, const Mesh& mesh);

}  // namespace viseme
