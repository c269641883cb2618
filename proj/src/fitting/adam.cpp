#include "viseme/adam.hpp"

#include "viseme/error.hpp"

#include <cmath>

namespace viseme {

void adam_step(AdamState& state, std::span<double> params, std::span<const double> grad, double lr)
{
    if (params.size() != grad.size() || state.m.size() != params.size() || state.v.size() != params.size()) {
        throw DimensionError("Adam state, parameters and gradient must have equal length");
    }
    for (double g : grad) {
        if (!std::isfinite(g)) {
            throw NumericError("non-finite gradient");
        }
    }
    ++state.step;
    const double t = static_cast<double>(state.step);
    const double c1 = 1.0 - std::pow(state.beta1, t);
    const double c2 = 1.0 - std::pow(state.beta2, t);
    for (std::size_t i = 0; i < params.size(); ++i) {
        state.m[i] = state.beta1 * state.m[i] + (1.0 - state.beta1) * grad[i];
        state.v[i] = state.beta2 * state.v[i] + (1.0 - state.beta2) * grad[i] * grad[i];
        const double mhat = state.m[i] / c1;
        const double vhat = state.v[i] / c2;
        params[i] -= lr * mhat / (std::sqrt(vhat) + state.eps);
    }
}

void adam_step(AdamState& state, FrameParams& params, const FrameGradient& grad, double lr)
{
    const auto nv = params.weights.size();
    auto flat = flatten(params);
    const auto g = grad.flatten();
    adam_step(state, flat, g, lr);
    auto updated = unflatten(flat, nv);
    updated.rotation = updated.rotation.normalized();
    params = std::move(updated);
}

double scheduled_lr(std::size_t iter, double lr0, std::size_t decay_every, double decay_factor)
{
    if (decay_every == 0) {
        throw ConfigError("decay_every must be positive");
    }
    return lr0 * std::pow(decay_factor, static_cast<double>(iter / decay_every));
}

}  // namespace viseme
