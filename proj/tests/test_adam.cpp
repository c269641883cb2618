#include "support.hpp"

#include "viseme/adam.hpp"
#include "viseme/error.hpp"

#include <gtest/gtest.h>

using namespace viseme;

TEST(Adam, ZeroGradientLeavesParams)
{
    AdamState s(3);
    std::vector<double> p{1.0, -2.0, 0.5};
    const auto before = p;
    adam_step(s, p, std::vector<double>(3, 0.0), 0.1);
    EXPECT_EQ(p, before);
    EXPECT_EQ(s.step, 1u);
}

TEST(Adam, FirstStepIsLrTimesSign)
{
    test::Rng rng(1);
    for (int trial = 0; trial < 100; ++trial) {
        AdamState s(5);
        std::vector<double> p(5), g(5);
        for (std::size_t i = 0; i < 5; ++i) {
            p[i] = rng.uniform(-1, 1);
            g[i] = rng.uniform(0.1, 10) * (rng.uniform() < 0.5 ? -1.0 : 1.0);
        }
        const auto before = p;
        adam_step(s, p, g, 0.1);
        for (std::size_t i = 0; i < 5; ++i) {
            EXPECT_NEAR(p[i] - before[i], -0.1 * (g[i] > 0 ? 1.0 : -1.0), 1e-6);
        }
    }
}

TEST(Adam, NonFiniteGradientThrowsAndKeepsState)
{
    AdamState s(2);
    std::vector<double> p{1.0, 2.0};
    EXPECT_THROW(adam_step(s, p, std::vector<double>{1.0, std::nan("")}, 0.1), NumericError);
    EXPECT_EQ(s.step, 0u);
    EXPECT_EQ(p, (std::vector<double>{1.0, 2.0}));
    EXPECT_THROW(adam_step(s, p, std::vector<double>{1.0}, 0.1), DimensionError);
}

TEST(Adam, Schedule)
{
    for (std::size_t k = 0; k < 25; ++k) {
        EXPECT_DOUBLE_EQ(scheduled_lr(10 * k, 0.1, 10, 0.9), 0.1 * std::pow(0.9, static_cast<double>(k)));
        EXPECT_DOUBLE_EQ(scheduled_lr(10 * k + 9, 0.1, 10, 0.9), 0.1 * std::pow(0.9, static_cast<double>(k)));
    }
    EXPECT_THROW(scheduled_lr(0, 0.1, 0, 0.9), ConfigError);
}

TEST(Adam, FrameStepKeepsUnitRotation)
{
    test::Rng rng(2);
    FrameParams p{{0.1, 0.2}, rng.unit_quat(), Vec3(0, 0, 5)};
    AdamState s(9);
    for (int k = 0; k < 50; ++k) {
        FrameGradient g(2);
        for (auto& r : g.rotation) {
            r = rng.uniform(-1, 1);
        }
        g.weights = {rng.uniform(-1, 1), rng.uniform(-1, 1)};
        adam_step(s, p, g, 0.1);
        EXPECT_NEAR(p.rotation.norm(), 1.0, 1e-12);
    }
}

TEST(Adam, MinimizesQuadratic)
{
    AdamState s(2);
    std::vector<double> p{3.0, -4.0};
    for (std::size_t it = 0; it < 400; ++it) {
        const std::vector<double> g{2.0 * (p[0] - 1.0), 2.0 * (p[1] + 2.0)};
        adam_step(s, p, g, scheduled_lr(it, 0.1, 10, 0.97));
    }
    EXPECT_NEAR(p[0], 1.0, 1e-3);
    EXPECT_NEAR(p[1], -2.0, 1e-3);
}
