#pragma once

#include "viseme/observation.hpp"

#include <span>
#include <vector>

namespace viseme {

/// Forward-backward consistency screening. For every vertex with previous
/// projection p (NaN entries are skipped): u = forward(p); the vertex is kept
/// when p + u stays inside the grid and |u + backward(p + u)| < tau.
std::vector<FlowCorrespondence> screen_flow(const FlowGrid& forward, const FlowGrid& backward, double tau,
                                            std::span<const Vec2> previous_projections);

}  // namespace viseme
