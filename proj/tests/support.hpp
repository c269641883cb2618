#pragma once

#include "viseme/camera.hpp"
#include "viseme/losses.hpp"
#include "viseme/observation.hpp"
#include "viseme/rig.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <functional>
#include <random>
#include <string>
#include <vector>

namespace viseme::test {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}
    double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    Vec3 vec3(double lo, double hi) { return {uniform(lo, hi), uniform(lo, hi), uniform(lo, hi)}; }
    Quat unit_quat()
    {
        std::normal_distribution<double> n;
        Quat q{n(engine_), n(engine_), n(engine_), n(engine_)};
        return q.normalized();
    }
    std::mt19937_64& engine() { return engine_; }

private:
    std::mt19937_64 engine_;
};

/// Small random rig: a jittered grid in front of the camera with colors,
/// `v` visemes of random displacement and one landmark per `stride` vertices.
inline Rig random_rig(Rng& rng, std::size_t visemes, int cols = 5, int rows = 4, int stride = 2)
{
    Mesh neutral;
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < cols; ++c) {
            neutral.vertices.emplace_back(-0.5 + c * 0.25 + rng.uniform(-0.03, 0.03),
                                          -0.4 + r * 0.25 + rng.uniform(-0.03, 0.03), rng.uniform(-0.1, 0.1));
            neutral.colors.emplace_back(rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9), rng.uniform(0.1, 0.9));
        }
    }
    for (int r = 0; r + 1 < rows; ++r) {
        for (int c = 0; c + 1 < cols; ++c) {
            const auto a = static_cast<std::uint32_t>(r * cols + c);
            neutral.triangles.push_back({a, a + static_cast<std::uint32_t>(cols), a + 1});
        }
    }
    std::vector<Mesh> shapes;
    for (std::size_t i = 0; i < visemes; ++i) {
        Mesh m = neutral;
        for (auto& v : m.vertices) {
            v += rng.vec3(-0.08, 0.08);
        }
        shapes.push_back(std::move(m));
    }
    std::vector<LandmarkBinding> bindings;
    std::vector<int> mouth;
    int id = 0;
    for (std::uint32_t k = 0; k < neutral.vertices.size(); k += static_cast<std::uint32_t>(stride)) {
        bindings.push_back({id, k});
        if (id % 3 == 0) {
            mouth.push_back(id);
        }
        ++id;
    }
    return Rig(neutral, std::move(shapes), default_viseme_labels(visemes), bindings, std::nullopt, mouth);
}

inline Pose random_pose(Rng& rng, const Intrinsics& k)
{
    const Vec3 axis = rng.vec3(-1, 1).normalized();
    return Pose{Quat::from_axis_angle(axis, rng.uniform(-0.3, 0.3)),
                Vec3(rng.uniform(-0.1, 0.1), rng.uniform(-0.1, 0.1), rng.uniform(4.0, 6.0)), k};
}

/// Affine image whose float samples are exact, so the bilinear interpolant is
/// affine everywhere (no kinks between cells).
inline Image affine_image(Rng& rng, int w, int h)
{
    Image img(w, h);
    Vec3 a, bx, by;
    for (int c = 0; c < 3; ++c) {
        a[c] = rng.integer(32, 96) / 256.0;
        bx[c] = rng.integer(-2, 2) / 4096.0;
        by[c] = rng.integer(-2, 2) / 4096.0;
    }
    for (int y = 0; y < h; ++y) {
        for (int x = 0; x < w; ++x) {
            img.set_pixel(x, y, a + bx * x + by * y);
        }
    }
    return img;
}

using Objective = std::function<double(const FrameParams&)>;

/// Central differences over the flattened parameters with step h. Rotation
/// components are perturbed and re-normalized, so the result is the tangent
/// gradient the analytic code reports.
inline std::vector<double> numeric_gradient(const Objective& f, const FrameParams& p, double h = 1e-4)
{
    const auto v = p.weights.size();
    const auto base = flatten(p);
    std::vector<double> g(base.size());
    for (std::size_t k = 0; k < base.size(); ++k) {
        auto plus = base;
        auto minus = base;
        plus[k] += h;
        minus[k] -= h;
        auto pp = unflatten(plus, v);
        auto pm = unflatten(minus, v);
        pp.rotation = pp.rotation.normalized();
        pm.rotation = pm.rotation.normalized();
        g[k] = (f(pp) - f(pm)) / (2.0 * h);
    }
    return g;
}

/// max |a - n| / max |n|, falling back to the absolute error when n vanishes.
inline double relative_error(const std::vector<double>& analytic, const std::vector<double>& numeric)
{
    double diff = 0.0, scale = 0.0;
    for (std::size_t k = 0; k < analytic.size(); ++k) {
        diff = std::max(diff, std::abs(analytic[k] - numeric[k]));
        scale = std::max(scale, std::abs(numeric[k]));
    }
    return scale > 1e-8 ? diff / scale : diff;
}

inline std::filesystem::path temp_dir(const std::string& name)
{
    auto dir = std::filesystem::temp_directory_path() / ("viseme_test_" + name);
    std::filesystem::remove_all(dir);
    std::filesystem::create_directories(dir);
    return dir;
}

}  // namespace viseme::test
