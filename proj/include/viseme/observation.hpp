#pragma once

#include "viseme/geometry.hpp"

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace viseme {

/// RGB image with channel values in [0,1], row-major.
class Image {
public:
    Image() = default;
    Image(int width, int height, Vec3 fill = Vec3::Zero());

    int width() const noexcept { return width_; }
    int height() const noexcept { return height_; }
    bool empty() const noexcept { return width_ == 0 || height_ == 0; }

    Vec3 pixel(int x, int y) const;
    void set_pixel(int x, int y, const Vec3& rgb);

    /// True when bilinear sampling at p needs no clamping: p in [0,W-1]x[0,H-1].
    bool contains(const Vec2& p) const noexcept;

    std::span<const float> data() const noexcept { return rgb_; }

private:
    int width_ = 0;
    int height_ = 0;
    std::vector<float> rgb_;
};

/// Bilinear sample and its exact partial derivatives inside the containing cell.
struct ImageSample {
    Vec3 value;
    Vec3 d_dx;
    Vec3 d_dy;
};

/// Precondition: image.contains(p).
ImageSample sample_bilinear(const Image& image, const Vec2& p);

/// Binary PPM (P6, maxval 255).
Image parse_ppm(std::span<const std::uint8_t> bytes, std::string_view source_name = "<ppm>");
std::string serialize_ppm(const Image& image);
Image read_ppm(const std::filesystem::path& path);
void write_ppm(const std::filesystem::path& path, const Image& image);

/// A detected 2D landmark in pixels with its importance weight.
struct LandmarkObservation {
    int landmark_id = 0;
    Vec2 position = Vec2::Zero();
    /// Weight; NaN means "use the rig's default for this id".
    double beta = 1.0;
};

/// Landmark CSV `frame,landmark_id,x,y,beta` (header optional, beta may be
/// empty). Returns frame -> observations.
std::map<std::size_t, std::vector<LandmarkObservation>> parse_landmark_csv(std::string_view text,
                                                                            std::string_view source_name = "<landmarks>");
std::string serialize_landmark_csv(const std::map<std::size_t, std::vector<LandmarkObservation>>& table);

/// Dense 2D displacement field in pixels, row-major (dx, dy) pairs.
class FlowGrid {
public:
    FlowGrid() = default;
    FlowGrid(std::uint32_t width, std::uint32_t height, Vec2 fill = Vec2::Zero());

    std::uint32_t width() const noexcept { return width_; }
    std::uint32_t height() const noexcept { return height_; }
    Vec2 at(std::uint32_t x, std::uint32_t y) const;
    void set(std::uint32_t x, std::uint32_t y, const Vec2& d);
    bool contains(const Vec2& p) const noexcept;
    /// Precondition: contains(p).
    Vec2 sample(const Vec2& p) const;

    std::span<const float> data() const noexcept { return data_; }
    bool operator==(const FlowGrid&) const = default;

private:
    std::uint32_t width_ = 0;
    std::uint32_t height_ = 0;
    std::vector<float> data_;
};

/// Forward (frame j-1 -> j) and backward (j -> j-1) flow for one frame pair.
struct FlowPair {
    FlowGrid forward;
    FlowGrid backward;
    bool operator==(const FlowPair&) const = default;
};

/// Binary layout: magic `FLO1`, width and height as little-endian uint32,
/// then H*W*2 little-endian float32 for the forward grid followed by the same
/// for the backward grid.
FlowPair parse_flow(std::span<const std::uint8_t> bytes, std::string_view source_name = "<flow>");
std::string serialize_flow(const FlowPair& flow);
FlowPair read_flow(const std::filesystem::path& path);
void write_flow(const std::filesystem::path& path, const FlowPair& flow);

/// A screened vertex correspondence: vertex k moved by `displacement` pixels
/// between the previous frame and this one.
struct FlowCorrespondence {
    std::uint32_t vertex = 0;
    Vec2 displacement = Vec2::Zero();
};

/// Everything observed for one video frame. Absent parts contribute nothing.
struct FrameObservation {
    std::vector<LandmarkObservation> landmarks;
    std::optional<Image> image;
    /// Flow from the previous frame; screened against the previous solution during fitting.
    std::optional<FlowPair> flow;
    /// Used when `flow` is absent: already-screened correspondences.
    std::vector<FlowCorrespondence> flow_correspondences;
};

/// Observation directory layout:
///   landmarks.csv            all frames
///   frame_%05d.ppm           optional image per frame
///   flow_%05d.flo            optional flow from frame j-1 to j
std::string image_file_name(std::size_t frame);
std::string flow_file_name(std::size_t frame);

struct ObservationLoadReport {
    std::size_t frames = 0;
    std::vector<std::size_t> missing_flow;  ///< frames >= 1 without a flow file
    std::vector<std::size_t> missing_image;
};

/// Loads `frames` observations (or as many as the landmark table spans when
/// `frames` is nullopt). Missing images and flow files are tolerated and reported.
std::vector<FrameObservation> load_observations(const std::filesystem::path& dir, std::optional<std::size_t> frames,
                                                ObservationLoadReport* report = nullptr);

}  // namespace viseme
