#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "vacmass/dynamics.hpp"

using namespace vacmass;

TEST(Step, RestIsFixedPoint)
{
    const TrajectoryState s{0.0, 2.0, 0.0, 1.0};
    const auto next = step(s, 0.0, 1.0, 0.0, 0.1);
    EXPECT_DOUBLE_EQ(next.t, 0.1);
    EXPECT_EQ(next.q, 2.0);
    EXPECT_EQ(next.p, 0.0);
    EXPECT_EQ(next.m, 1.0);
}

TEST(Step, SpeedStaysBelowLightForLargeForce)
{
    // Up to p/m ~ 1e7; beyond ~1e8 the speed rounds to exactly 1 in double precision.
    TrajectoryState s{0.0, 0.0, 0.0, 1.0};
    for (int i = 0; i < 100; ++i) {
        s = step(s, 1e6, 1.0, 0.0, 0.1);
        EXPECT_LT(std::abs(s.velocity()), 1.0);
        EXPECT_LE(s.dispersion_residual(), 1e-15);
    }
}

TEST(Step, RejectsNonPositiveMass)
{
    EXPECT_THROW(step({0.0, 0.0, 0.0, 0.0}, 0.0, 1.0, 0.0, 0.1), ValidationError);
    EXPECT_THROW(step({0.0, 0.0, 0.0, 1.0}, 0.0, 1.0, -2.0, 0.1), NumericalError);
    EXPECT_THROW(step({0.0, 0.0, 0.0, 1.0}, 0.0, 1.0, 0.0, 0.0), ValidationError);
}

TEST(Simulation, ConstantForceReproducesAnalyticVelocity)
{
    SimulationConfig cfg;
    cfg.constant_force = 1.0;
    cfg.m_bare = 1.0;
    cfg.dt = 1e-3;
    cfg.steps = 1000;  // F T / m = 1
    const auto r = run_trajectory(cfg);
    EXPECT_NEAR(r.states.back().velocity(), 1.0 / std::sqrt(2.0), 1e-6);
    EXPECT_NEAR(r.states.back().t, 1.0, 1e-12);
}

TEST(Simulation, ZeroNoiseIsFreeMotion)
{
    SimulationConfig cfg;
    cfg.noise_scale = 0.0;
    cfg.p0 = 0.75;
    cfg.q0 = -1.0;
    cfg.steps = 500;
    const auto r = run_trajectory(cfg);
    const double v = 0.75 / std::hypot(0.75, 1.0);
    for (const auto& s : r.states) EXPECT_NEAR(s.q, -1.0 + v * s.t, 1e-12);
    EXPECT_FALSE(r.diagnostics.periodogram_fit.has_value());
}

TEST(Simulation, NoiseRunRespectsInvariants)
{
    SimulationConfig cfg;
    cfg.noise_band = {0.0, 5.0};
    cfg.dt = 0.02;
    cfg.steps = 50000;
    cfg.noise_scale = 20.0;
    const auto r = run_trajectory(cfg);
    EXPECT_LT(r.diagnostics.max_speed, 1.0);
    EXPECT_LT(r.diagnostics.max_step_ratio, 1.0);
    EXPECT_LT(r.diagnostics.max_dispersion_residual, 1e-9);
    ASSERT_TRUE(r.diagnostics.periodogram_fit.has_value());
    EXPECT_NEAR(*r.diagnostics.periodogram_fit, 1.0, 0.1);
}

TEST(Simulation, MassChannelNeverBelowBareMass)
{
    SimulationConfig cfg;
    cfg.mass_channel = true;
    cfg.noise_band = {0.0, 5.0};
    cfg.dt = 0.02;
    cfg.steps = 4000;
    cfg.m_bare = 0.3;
    const auto r = run_trajectory(cfg);
    for (const auto& s : r.states) EXPECT_GE(s.m, 0.3);
    EXPECT_GT(r.diagnostics.mass_mean, 0.0);
    EXPECT_DOUBLE_EQ(r.diagnostics.mass_mean_prediction, mean_induced_mass_analytic(cfg.model, 5.0));
}

TEST(Simulation, DeterministicPerSeedAndStrideRespected)
{
    SimulationConfig cfg;
    cfg.steps = 2000;
    cfg.seed = 77;
    cfg.record_stride = 7;
    const auto a = run_trajectory(cfg);
    const auto b = run_trajectory(cfg);
    EXPECT_EQ(a.states, b.states);
    EXPECT_EQ(a.states.size(), 1 + 2000 / 7 + 1);
    cfg.seed = 78;
    EXPECT_NE(run_trajectory(cfg).states, a.states);
}

TEST(Simulation, ResolutionBoundEnforced)
{
    SimulationConfig cfg;
    cfg.noise_band = {0.0, 10.0};
    cfg.dt = 0.02;
    EXPECT_THROW(cfg.validate(), ValidationError);
    cfg.noise_scale = 0.0;
    EXPECT_NO_THROW(cfg.validate());
}

TEST(Comparison, ZeroNoiseIdentical)
{
    SimulationConfig cfg;
    cfg.noise_scale = 0.0;
    cfg.steps = 100;
    const auto c = nonrelativistic_comparison(cfg);
    EXPECT_EQ(c.max_position_discrepancy, 0.0);
}

TEST(Comparison, ConstantForceDiscrepancyScalesWithSpeed)
{
    SimulationConfig cfg;
    cfg.dt = 1e-4;
    cfg.steps = 10000;  // T = 1
    cfg.constant_force = 0.01;
    const auto slow = nonrelativistic_comparison(cfg);
    EXPECT_NEAR(slow.final_velocity_discrepancy, 0.5 * 0.01 * 0.01, 1e-6);

    cfg.constant_force = 1.0;
    const auto fast = nonrelativistic_comparison(cfg);
    EXPECT_NEAR(fast.newtonian.states.back().p / fast.newtonian.states.back().m, 1.0, 1e-12);
    EXPECT_NEAR(fast.final_velocity_discrepancy, 1.0 - 1.0 / std::sqrt(2.0), 1e-6);
}

TEST(Ensemble, MatchesSerialRunsAndMomentumDiffuses)
{
    SimulationConfig cfg;
    cfg.noise_band = {0.0, 5.0};
    cfg.dt = 0.02;
    cfg.steps = 4096;
    cfg.record_stride = 1024;
    std::vector<std::uint64_t> seeds(64);
    std::iota(seeds.begin(), seeds.end(), 100);
    const auto results = run_ensemble(cfg, seeds, 4);
    ASSERT_EQ(results.size(), seeds.size());

    SimulationConfig single = cfg;
    single.seed = seeds[3];
    EXPECT_EQ(run_trajectory(single).states, results[3].states);

    // Force noise has no DC component, so <p^2> stays bounded rather than growing linearly.
    std::vector<double> p2(results.front().states.size(), 0.0);
    for (const auto& r : results)
        for (std::size_t i = 0; i < r.states.size(); ++i) p2[i] += r.states[i].p * r.states[i].p / seeds.size();
    const double late = p2.back();
    const double mid = p2[p2.size() / 2];
    EXPECT_LT(late, 3.0 * mid);
}
