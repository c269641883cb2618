#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

namespace viseme {

/// Per-frame viseme weights sampled at a fixed frame rate.
struct Curve {
    double fps = 30.0;
    std::vector<std::string> labels;
    std::vector<std::vector<double>> frames;  ///< frames[j][i], one row of labels.size() values per frame

    Curve() = default;
    Curve(double fps_, std::vector<std::string> labels_, std::size_t frame_count);

    std::size_t frame_count() const noexcept { return frames.size(); }
    std::size_t viseme_count() const noexcept { return labels.size(); }

    bool operator==(const Curve&) const = default;
};

/// `# fps=<float>` line, header `frame,<label_1>,...,<label_V>`, then one row
/// per frame with 6-decimal fixed-point values.
std::string serialize_curve(const Curve& curve);
Curve parse_curve(std::string_view text, std::string_view source_name = "<curve>");

void write_curve(const std::filesystem::path& path, const Curve& curve);
Curve read_curve(const std::filesystem::path& path);

}  // namespace viseme
