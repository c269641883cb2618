#pragma once

#include "viseme/losses.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace viseme {

/// Adam moment estimates for one parameter vector.
struct AdamState {
    std::vector<double> m;
    std::vector<double> v;
    std::size_t step = 0;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;

    AdamState() = default;
    explicit AdamState(std::size_t dim) : m(dim, 0.0), v(dim, 0.0) {}
};

/// One bias-corrected Adam update in place. Throws NumericError on a
/// non-finite gradient entry (state and params are left untouched).
void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad, double lr);

/// Adam over the flattened frame parameters, then re-normalizes the rotation.
void adam_step(AdamState& state, FrameParams& params, const FrameGradient& grad, double lr);

/// lr0 * decay_factor^floor(iter / decay_every), iterations counted from 0.
double scheduled_lr(std::size_t iter, double lr0, std::size_t decay_every, double decay_factor);

}  // namespace viseme
