#include <gtest/gtest.h>

#include <chrono>

#include "csbp/error.hpp"
#include "csbp/verify.hpp"

using namespace csbp;

namespace
{
RunConfig small()
{
    RunConfig cfg;
    cfg.verify.paths = 3000;
    cfg.verify.survival_paths = 3000;
    cfg.verify.s_ladder = {1, 2};
    cfg.verify.roundtrip_paths = 20;
    cfg.sim.dt = 1e-2;
    cfg.seed = 5;
    return cfg;
}

std::string dump(SuiteReport const& r) { return to_json(r).dump(); }
}  // namespace

TEST(Verify, LaplaceSuitePassesQuickly)
{
    auto const start = std::chrono::steady_clock::now();
    auto const rep = run_verify(Suite::laplace, RunConfig{});
    double const secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    EXPECT_TRUE(rep.pass());
    EXPECT_LT(secs, 1.0);
    for (auto const& c : rep.checks)
    {
        EXPECT_TRUE(c.extra.contains("criterion"));
        EXPECT_LE(c.estimate, 1e-8) << c.name;
    }
}

TEST(Verify, SuiteNames)
{
    for (Suite s : all_suites())
        EXPECT_EQ(suite_from_string(to_string(s)), s);
    EXPECT_THROW(suite_from_string("everything"), ConfigError);
}

TEST(Verify, RerunAndThreadCountAreBitIdentical)
{
    RunConfig one = small();
    RunConfig many = small();
    many.threads = 3;
    for (Suite s : {Suite::martingale, Suite::marking})
    {
        auto const a = dump(run_verify(s, one));
        EXPECT_EQ(a, dump(run_verify(s, one)));
        EXPECT_EQ(a, dump(run_verify(s, many)));
    }
}

TEST(Verify, SeedChangesStatisticalReports)
{
    RunConfig a = small(), b = small();
    b.seed = 6;
    EXPECT_NE(dump(run_verify(Suite::martingale, a)), dump(run_verify(Suite::martingale, b)));
}
