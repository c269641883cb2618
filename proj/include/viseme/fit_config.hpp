#pragma once

#include "viseme/camera.hpp"

#include <cstddef>
#include <filesystem>
#include <string_view>

namespace viseme {

/// Weights w1..w7 of the per-frame objective.
struct LossWeights {
    double lmk = 0.8;
    double rgb = 1.0;
    double sup = 800.0;
    double act = 150.0;
    double flow = 1.0;
    double diff = 300.0;
    double range = 100.0;
};

struct FitConfig {
    LossWeights weights;

    // Guidance: activate the top-n visemes of the procedural frame, suppress
    // those outside the top-m of every frame within +-radius.
    std::size_t m = 3;
    std::size_t n = 2;
    std::size_t radius = 2;
    double eps_act = 0.01;

    // Adam schedule: lr0 * decay_factor^(iter / decay_every).
    std::size_t iters = 250;
    double lr0 = 0.1;
    std::size_t decay_every = 10;
    double decay_factor = 0.9;

    double tau_flow = 1.0;  ///< forward-backward consistency threshold, pixels

    Intrinsics intrinsics{1000.0, 640.0, 360.0};
    /// Depth used for the first frame's pose when too few landmarks are observed.
    double init_depth = 10.0;

    // Landmark weights applied when the landmark file leaves beta empty.
    double mouth_beta = 5.0;
    double default_beta = 1.0;

    /// Throws ConfigError when a field breaks its invariant.
    void validate() const;

    /// Key-value text: w1..w7, m, n, radius, iters, lr0, decay_every,
    /// decay_factor, tau_flow, eps_act, focal, cx, cy, init_depth, mouth_beta,
    /// default_beta. Unlisted keys keep their defaults.
    static FitConfig parse(std::string_view text, std::string_view source_name = "<config>");
    static FitConfig load(const std::filesystem::path& path);
};

std::string serialize_fit_config(const FitConfig& cfg);

}  // namespace viseme
