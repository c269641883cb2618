#pragma once

#include "viseme/camera.hpp"
#include "viseme/curve.hpp"
#include "viseme/observation.hpp"
#include "viseme/rig.hpp"

#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace viseme {

struct MetricSeries {
    std::string name;
    double fps = 30.0;
    std::vector<double> values;
};

/// Per frame, mean pixel distance between projected bound vertices and the
/// observed landmarks whose ids are in `subset` (all bound ids when empty).
/// Frames are evaluated up to the shorter of curve and poses. Ids without an
/// observation are skipped; a frame with none left throws DimensionError.
MetricSeries keypoint_error(const Rig& rig, const Curve& curve, std::span<const Pose> poses,
                            std::span<const std::vector<LandmarkObservation>> landmarks,
                            std::span<const int> subset = {});

struct LipDistances {
    MetricSeries horizontal;
    MetricSeries vertical;
};

/// |dx| of the horizontal pair and |dy| of the vertical pair on the baked mesh.
LipDistances lip_distance_curves(const Rig& rig, const Curve& curve, const LipPairs& pairs);
LipDistances lip_distance_curves(const Rig& rig, const Curve& curve);

/// sum_j |x^j_i - x^(j-1)_i| per viseme.
std::vector<double> total_variation(const Curve& curve);

double mean(std::span<const double> values);

/// `# name=<name>`, `# fps=<fps>`, header `frame,value`, then one row per frame.
std::string serialize_metric(const MetricSeries& series);

}  // namespace viseme
