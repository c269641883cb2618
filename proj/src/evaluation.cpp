#include "viseme/evaluation.hpp"

#include "viseme/error.hpp"
#include "viseme/text_io.hpp"

#include <algorithm>
#include <cmath>

namespace viseme {

MetricSeries keypoint_error(const Rig& rig, const Curve& curve, std::span<const Pose> poses,
                            std::span<const std::vector<LandmarkObservation>> landmarks, std::span<const int> subset)
{
    const auto frames = std::min({curve.frame_count(), poses.size(), landmarks.size()});
    MetricSeries out{"keypoint_error", curve.fps, {}};
    out.values.reserve(frames);
    std::vector<double> flat(3 * rig.vertex_count());
    for (std::size_t j = 0; j < frames; ++j) {
        blend_vertices(rig, curve.frames[j], flat);
        double sum = 0.0;
        std::size_t count = 0;
        for (const auto& obs : landmarks[j]) {
            if (!subset.empty() && std::find(subset.begin(), subset.end(), obs.landmark_id) == subset.end()) {
                continue;
            }
            const auto v = rig.vertex_for_landmark(obs.landmark_id);
            if (!v) {
                continue;
            }
            const Vec3 p(flat[3 * *v], flat[3 * *v + 1], flat[3 * *v + 2]);
            sum += (project(p, poses[j]) - obs.position).norm();
            ++count;
        }
        if (count == 0) {
            throw DimensionError("frame " + std::to_string(j) + ": no observed landmark in the evaluated subset");
        }
        out.values.push_back(sum / static_cast<double>(count));
    }
    return out;
}

LipDistances lip_distance_curves(const Rig& rig, const Curve& curve, const LipPairs& pairs)
{
    const auto n = rig.vertex_count();
    for (auto v : {pairs.horizontal[0], pairs.horizontal[1], pairs.vertical[0], pairs.vertical[1]}) {
        if (v >= n) {
            throw TopologyError("lip pair vertex " + std::to_string(v) + " out of range");
        }
    }
    LipDistances out{{"lip_horizontal", curve.fps, {}}, {"lip_vertical", curve.fps, {}}};
    std::vector<double> flat(3 * n);
    for (const auto& row : curve.frames) {
        blend_vertices(rig, row, flat);
        out.horizontal.values.push_back(std::abs(flat[3 * pairs.horizontal[0]] - flat[3 * pairs.horizontal[1]]));
        out.vertical.values.push_back(std::abs(flat[3 * pairs.vertical[0] + 1] - flat[3 * pairs.vertical[1] + 1]));
    }
    return out;
}

LipDistances lip_distance_curves(const Rig& rig, const Curve& curve)
{
    if (!rig.lip_pairs()) {
        throw ConfigError("rig declares no lip pairs");
    }
    return lip_distance_curves(rig, curve, *rig.lip_pairs());
}

std::vector<double> total_variation(const Curve& curve)
{
    std::vector<double> tv(curve.viseme_count(), 0.0);
    for (std::size_t j = 1; j < curve.frame_count(); ++j) {
        for (std::size_t i = 0; i < tv.size(); ++i) {
            tv[i] += std::abs(curve.frames[j][i] - curve.frames[j - 1][i]);
        }
    }
    return tv;
}

double mean(std::span<const double> values)
{
    if (values.empty()) {
        return 0.0;
    }
    double s = 0.0;
    for (double v : values) {
        s += v;
    }
    return s / static_cast<double>(values.size());
}

std::string serialize_metric(const MetricSeries& series)
{
    std::string out = "# name=" + series.name + "\n# fps=" + format_double(series.fps) + "\nframe,value\n";
    for (std::size_t j = 0; j < series.values.size(); ++j) {
        out += std::to_string(j) + "," + format_double(series.values[j]) + "\n";
    }
    return out;
}

}  // namespace viseme
