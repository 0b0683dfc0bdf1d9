#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "csbp/conditioning.hpp"
#include "csbp/error.hpp"
#include "csbp/laplace.hpp"

using namespace csbp;

namespace
{
BranchingMechanism feller() { return {-1, std::numbers::sqrt2}; }
BranchingMechanism quadratic() { return {0, std::numbers::sqrt2}; }

SimConfig quick()
{
    SimConfig c;
    c.dt = 1e-2;
    c.seed = 17;
    return c;
}

JumpAtom atom(double t, double zb, double r, double u, bool applied = true)
{
    JumpAtom a;
    a.t = t;
    a.z_before = zb;
    a.r = r;
    a.nu = applied ? zb / 2 : zb * 2;
    a.u = u;
    a.z_after = applied ? zb + r : zb;
    a.applied = applied;
    return a;
}
}  // namespace

TEST(HWeight, DefinitionAndAbsorption)
{
    SimPath p;
    p.x0 = 2;
    p.times = {0, 0.5, 1};
    p.values = {2, 3, 0};
    p.left_values = {2, 3, 0};
    p.end_time = 1;
    EXPECT_DOUBLE_EQ(hweight(p, feller(), 0.5), std::exp(0.5) * 1.5);
    p.absorption_time = 1;
    EXPECT_EQ(hweight(p, feller(), 1), 0);
    EXPECT_THROW(hweight(p, feller(), 2), DomainError);
}

TEST(MarkJumps, Rule)
{
    SimPath p;
    p.atoms = {atom(0.1, 1, 1, 0.3),  // ratio 1/2: retained
               atom(0.2, 1, 1, 0.7),  // immigrant
               atom(0.3, 1, 1, 0.7, false)};  // thinned, z_after = z_before
    auto const m = mark_jumps(p);
    ASSERT_EQ(m.size(), 3u);
    EXPECT_EQ(m[0].kind, MarkKind::retained);
    EXPECT_EQ(m[0].delta, 0);
    EXPECT_EQ(m[1].kind, MarkKind::immigrant);
    EXPECT_EQ(m[1].delta, 1);
    EXPECT_EQ(m[2].kind, MarkKind::retained);
    EXPECT_FALSE(m[2].applied);

    JumpAtom null = atom(0.4, 0, 0, 0.5);
    null.z_after = 0;
    p.atoms = {null};
    EXPECT_EQ(mark_jumps(p)[0].kind, MarkKind::null);

    p.atoms = {atom(0.1, 1, 1, NAN)};
    EXPECT_THROW(mark_jumps(p), DomainError);
    p.atoms = {atom(0.1, 1, 1, 0.5)};
    p.atoms[0].source = AtomSource::immigration;
    EXPECT_THROW(mark_jumps(p), DomainError);
}

TEST(MarkJumps, ImmigrantFractionOnSimulatedPath)
{
    // P(immigrant | atom) = r / (z + r); compare the sum over atoms
    auto const m = pure_stable_mechanism(1, 1.5);
    double expected = 0, observed = 0;
    SimConfig c = quick();
    for (std::uint64_t i = 0; i < 300; ++i)
    {
        c.path_index = i;
        auto const p = simulate_csbp(m, 1, c);
        auto const marks = mark_jumps(p);
        for (std::size_t k = 0; k < marks.size(); ++k)
        {
            expected += p.atoms[k].r / p.atoms[k].z_after;
            observed += marks[k].kind == MarkKind::immigrant;
        }
    }
    EXPECT_NEAR(observed, expected, 4 * std::sqrt(expected));
}

TEST(Girsanov, ResidualDefinition)
{
    SimPath p;
    p.times = {0, 0.5, 1};
    p.values = {1, 4, 1};
    p.left_values = {1, 4, 1};
    p.brownian_increments = {0, 0.3, -0.1};
    auto const r = girsanov_residual(p, BranchingMechanism(0, 2), 1);
    double const d1 = 0.3 - 2 * 0.25 * (1 + 0.5);
    double const d2 = -0.1 - 2 * 0.25 * (0.5 + 1);
    EXPECT_NEAR(r.total, d1 + d2, 1e-15);
    EXPECT_EQ(r.increments.size(), 3u);

    auto const none = girsanov_residual(p, BranchingMechanism(0, 0, LevyMeasure::stable(1, 1.5)), 1);
    EXPECT_NEAR(none.total, 0.2, 1e-15);

    p.values[1] = 0;
    EXPECT_THROW(girsanov_residual(p, BranchingMechanism(0, 2), 1), DomainError);
}

TEST(ImportanceExpectation, FellerMeanSmallEnsemble)
{
    auto const m = feller();
    std::vector<SimPath> paths;
    SimConfig c = quick();
    for (std::uint64_t i = 0; i < 20000; ++i)
    {
        c.path_index = i;
        paths.push_back(simulate_csbp(m, 1, c));
    }
    auto const e = importance_expectation(paths, m, 1, [](SimPath const& p) { return p.value_at(1); });
    EXPECT_NEAR(e.mean, 2 - std::exp(-1.0), 4 * e.std_error);
    auto const checks = martingale_check(paths, m, {0.5, 1});
    for (auto const& r : checks)
        EXPECT_LE(std::abs(r.estimate - 1), 4 * r.std_error);
}

TEST(SurvivalLadder, NestedAndCalibrated)
{
    auto const q = quadratic();
    auto const ladder = survival_conditioned_ladder(
        q, 1, 1, {1, 3, 9}, [](SimPath const& p) { return std::exp(-p.value_at(1)); }, 20000,
        quick(), 1);
    ASSERT_EQ(ladder.size(), 3u);
    for (std::size_t k = 0; k < ladder.size(); ++k)
    {
        auto const& e = ladder[k];
        EXPECT_NEAR(e.acceptance_rate, e.acceptance_oracle, 4 * e.acceptance_stderr + 0.003);
        EXPECT_NEAR(e.estimate.mean, survival_conditioned_laplace(q, 1, 1, 1, e.s),
                    4 * e.estimate.std_error);
        if (k)
            EXPECT_LE(e.n_accepted, ladder[k - 1].n_accepted);
    }
}

TEST(SurvivalLadder, ThreadCountDoesNotMatter)
{
    auto f = [](SimPath const& p) { return p.value_at(1); };
    auto const a = survival_conditioned_ladder(quadratic(), 1, 1, {2}, f, 500, quick(), 1);
    auto const b = survival_conditioned_ladder(quadratic(), 1, 1, {2}, f, 500, quick(), 3);
    EXPECT_EQ(a[0].estimate.mean, b[0].estimate.mean);
    EXPECT_EQ(a[0].n_accepted, b[0].n_accepted);
}

TEST(SurvivalLadder, FailsWhenNothingSurvives)
{
    auto f = [](SimPath const&) { return 1.0; };
    EXPECT_THROW(survival_conditioned_expectation(BranchingMechanism(-20, 3), 0.01, 1, 50, f, 20,
                                                  quick()),
                 StatisticalError);
}

TEST(SurvivalLadder, DefaultLadderScalesWithRho)
{
    EXPECT_EQ(default_s_ladder(quadratic()), (std::vector<double>{1, 2, 5, 10, 20}));
    EXPECT_EQ(default_s_ladder(BranchingMechanism(-2, 1)), (std::vector<double>{0.5, 1, 2.5, 5, 10}));
}
