#include "viseme/guidance.hpp"

#include "viseme/error.hpp"

#include <algorithm>
#include <numeric>

namespace viseme {

std::vector<std::size_t> top_k(std::span<const double> values, std::size_t k, double eps)
{
    std::vector<std::size_t> idx;
    idx.reserve(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] >= eps) {
            idx.push_back(i);
        }
    }
    const auto keep = std::min(k, idx.size());
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(keep), idx.end(),
                      [&](std::size_t a, std::size_t b) { return values[a] > values[b] || (values[a] == values[b] && a < b); });
    idx.resize(keep);
    return idx;
}

GuidanceSets guidance_sets(const Curve& procedural, std::size_t frame, const FitConfig& cfg)
{
    if (frame >= procedural.frame_count()) {
        throw DimensionError("guidance frame " + std::to_string(frame) + " out of range");
    }
    const auto v = procedural.viseme_count();
    GuidanceSets sets;
    sets.activate = top_k(procedural.frames[frame], cfg.n, cfg.eps_act);
    std::sort(sets.activate.begin(), sets.activate.end());

    std::vector<bool> significant(v, false);
    const auto lo = frame >= cfg.radius ? frame - cfg.radius : 0;
    const auto hi = std::min(procedural.frame_count() - 1, frame + cfg.radius);
    for (auto j = lo; j <= hi; ++j) {
        for (auto i : top_k(procedural.frames[j], cfg.m, cfg.eps_act)) {
            significant[i] = true;
        }
    }
    for (std::size_t i = 0; i < v; ++i) {
        if (!significant[i]) {
            sets.suppress.push_back(i);
        }
    }
    return sets;
}

}  // namespace viseme
