#include "viseme/flow.hpp"

#include "viseme/error.hpp"

namespace viseme {

std::vector<FlowCorrespondence> screen_flow(const FlowGrid& forward, const FlowGrid& backward, double tau,
                                            std::span<const Vec2> previous_projections)
{
    if (forward.width() != backward.width() || forward.height() != backward.height()) {
        throw DimensionError("forward and backward flow grids differ in size");
    }
    if (!(tau > 0.0)) {
        throw ConfigError("flow threshold must be positive");
    }
    std::vector<FlowCorrespondence> out;
    for (std::size_t k = 0; k < previous_projections.size(); ++k) {
        const Vec2& p = previous_projections[k];
        if (!p.allFinite() || !forward.contains(p)) {
            continue;
        }
        const Vec2 u = forward.sample(p);
        const Vec2 q = p + u;
        if (!backward.contains(q)) {
            continue;
        }
        if ((u + backward.sample(q)).norm() < tau) {
            out.push_back({static_cast<std::uint32_t>(k), u});
        }
    }
    return out;
}

}  // namespace viseme
