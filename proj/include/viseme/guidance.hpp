#pragma once

#include "viseme/curve.hpp"
#include "viseme/fit_config.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace viseme {

/// Per-frame viseme index sets derived from the procedural curve. Both are
/// sorted ascending and disjoint.
struct GuidanceSets {
    std::vector<std::size_t> suppress;
    std::vector<std::size_t> activate;

    bool operator==(const GuidanceSets&) const = default;
};

/// Indices of the k largest values >= eps, ties broken by lower index,
/// returned in rank order.
std::vector<std::size_t> top_k(std::span<const double> values, std::size_t k, double eps);

/// activate = top-n of frame j; suppress = visemes absent from the top-m of
/// every frame in [j - radius, j + radius] (clamped to the clip).
GuidanceSets guidance_sets(const Curve& procedural, std::size_t frame, const FitConfig& cfg);

}  // namespace viseme
