#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "csbp/error.hpp"
#include "csbp/lamperti.hpp"

using namespace csbp;

namespace
{
BranchingMechanism feller() { return {-1, std::numbers::sqrt2}; }

// X_s = 1 - s / 2 sampled on a grid of width h up to s_end
SimPath linear_levy(double h, double s_end)
{
    SimPath p;
    p.kind = PathKind::levy;
    p.x0 = 1;
    for (double s = 0; s <= s_end + 1e-12; s += h)
    {
        p.times.push_back(s);
        p.values.push_back(1 - s / 2);
        p.left_values.push_back(1 - s / 2);
        p.brownian_increments.push_back(0);
        p.small_jump_increments.push_back(0);
    }
    p.end_time = p.times.back();
    return p;
}

SimConfig quick(std::uint64_t i)
{
    SimConfig c;
    c.dt = 1e-3;
    c.horizon = 10;
    c.seed = 23;
    c.path_index = i;
    return c;
}
}  // namespace

TEST(LevyToCsbp, ClockOnDeterministicPath)
{
    // int_0^s dr / (1 - r/2) = -2 log(1 - s/2); trapezoid error is O(h^2)
    TimeChange clock;
    auto const z = levy_to_csbp(linear_levy(1e-3, 1.5), INFINITY, &clock);
    ASSERT_EQ(clock.source_times.size(), z.size());
    for (std::size_t i = 0; i < z.size(); i += 100)
    {
        double const s = clock.source_times[i];
        EXPECT_NEAR(clock.target_times[i], -2 * std::log(1 - s / 2), 1e-6);
        EXPECT_EQ(z.times[i], clock.target_times[i]);
        EXPECT_EQ(z.values[i], 1 - s / 2);
    }
    EXPECT_EQ(z.kind, PathKind::time_changed);
    EXPECT_FALSE(std::isfinite(z.absorption_time));
}

TEST(LevyToCsbp, FirstExceedanceStop)
{
    auto const z = levy_to_csbp(linear_levy(1e-2, 1.9), 0.5);
    EXPECT_GT(z.times.back(), 0.5);
    EXPECT_LE(z.times[z.size() - 2], 0.5);
    EXPECT_EQ(z.end_time, 0.5);
}

TEST(LevyToCsbp, AbsorptionAtZero)
{
    SimPath x = linear_levy(0.1, 1.9);
    x.times.push_back(2.0);
    x.values.push_back(0);
    x.left_values.push_back(0);
    x.brownian_increments.push_back(0);
    x.small_jump_increments.push_back(0);
    TimeChange clock;
    auto const z = levy_to_csbp(x, INFINITY, &clock);
    EXPECT_TRUE(std::isfinite(z.absorption_time));
    EXPECT_EQ(clock.absorbed_at, z.absorption_time);
    EXPECT_EQ(z.values.back(), 0);
    EXPECT_TRUE(z.absorbed_by(z.absorption_time));
}

TEST(CsbpToLevy, ClockIsIntegralOfZ)
{
    auto const z = simulate_csbp(feller(), 1, quick(1));
    TimeChange clock;
    auto const x = csbp_to_levy(z, &clock);
    double integral = 0;
    for (std::size_t i = 1; i < z.size(); ++i)
    {
        integral += 0.5 * (z.times[i] - z.times[i - 1]) * (z.values[i - 1] + z.left_values[i]);
        if (i < x.size())
            ASSERT_NEAR(x.times[i], integral, 1e-12);
        if (z.values[i] <= 0)
            break;
    }
}

TEST(RoundTrip, ErrorIsFirstOrderInDt)
{
    // The per-step clock mismatch is h (dX)^2 / (4 X X'), so the error at
    // a fixed path scales with dt
    LevyStop const stop{true, 1};
    double sum_coarse = 0, sum_fine = 0;
    for (std::uint64_t i = 0; i < 100; ++i)
    {
        SimConfig c = quick(i);
        c.dt = 2e-3;
        sum_coarse += lamperti_round_trip(simulate_levy(feller(), 1, c, stop)).sup_time_error / c.dt;
        c.dt = 1e-3;
        sum_fine += lamperti_round_trip(simulate_levy(feller(), 1, c, stop)).sup_time_error / c.dt;
    }
    EXPECT_GT(sum_fine, 0);
    EXPECT_NEAR(sum_coarse / sum_fine, 1, 0.5);
}

TEST(RoundTrip, ValuesMatchExactly)
{
    auto const x = simulate_levy(pure_stable_mechanism(1, 1.5), 1, quick(2), LevyStop{true, 1});
    auto const rt = lamperti_round_trip(x);
    EXPECT_EQ(rt.sup_value_error, 0);
    EXPECT_GT(rt.knots, 10u);
}

TEST(StableTheta, AtomsAreRescaledJumps)
{
    auto const m = pure_stable_mechanism(1, 1.5);
    SimConfig c = quick(3);
    c.horizon = 1;
    c.record_thinned = true;
    auto const q = simulate_qprocess(m, 1, c);
    auto const th = stable_theta_atoms(q, m);
    std::size_t applied = 0;
    for (auto const& a : q.atoms)
        if (a.source == AtomSource::branching && a.applied)
        {
            ASSERT_LT(applied, th.size());
            EXPECT_DOUBLE_EQ(th[applied].theta, a.r / std::pow(a.z_before, 1 / 1.5));
            ++applied;
        }
    EXPECT_EQ(applied, th.size());
    EXPECT_THROW(stable_theta_atoms(q, feller()), DomainError);
}

TEST(StableDecompose, ResidualVanishes)
{
    auto const m = pure_stable_mechanism(1, 1.5);
    for (auto small : {SmallJumps::drop, SmallJumps::gaussian})
        for (auto trunc : {Truncation::absolute, Truncation::stable_scaled})
        {
            SimConfig c = quick(4);
            c.horizon = 1;
            c.small_jumps = small;
            c.truncation = trunc;
            c.scale_reference = 0.5;
            auto const q = simulate_qprocess(m, 1, c);
            auto const d = stable_decompose(q, m);
            EXPECT_LT(d.max_abs_residual, 1e-11);
            EXPECT_GT(d.x_jumps, 0u);
            EXPECT_GT(d.s_jumps, 0u);
            EXPECT_FALSE(d.simultaneous_jumps);
            EXPECT_GE(d.s_total, d.s_jump_total);
        }
}

TEST(StableDecompose, RequiresCancellingDrift)
{
    auto const bad = BranchingMechanism(-1, 0, LevyMeasure::stable(1, 1.5));
    auto const q = simulate_qprocess(pure_stable_mechanism(1, 1.5), 1, quick(5));
    EXPECT_THROW(stable_decompose(q, bad), DomainError);
    EXPECT_THROW(stable_decompose(q, feller()), DomainError);
}
