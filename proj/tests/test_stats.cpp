#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "csbp/error.hpp"
#include "csbp/rng.hpp"
#include "csbp/stats.hpp"

using namespace csbp;

TEST(WeightedAccumulator, UnitWeightsAreTextbook)
{
    std::vector<double> const y = {1, 4, 2, 8, 5, 7};
    WeightedAccumulator acc;
    for (double v : y)
        acc.add(v);
    auto const e = acc.estimate(3);
    double mean = 0;
    for (double v : y)
        mean += v / 6;
    double s2 = 0;
    for (double v : y)
        s2 += (v - mean) * (v - mean) / 5;
    EXPECT_DOUBLE_EQ(e.mean, mean);
    EXPECT_NEAR(e.std_error, std::sqrt(s2 / 6), 1e-14);
    EXPECT_NEAR(e.half_width, 3 * e.std_error, 1e-14);
    EXPECT_DOUBLE_EQ(e.effective_n, 6);
    EXPECT_EQ(e.n, 6u);
}

TEST(WeightedAccumulator, MergeMatchesSequential)
{
    StreamEngine rng(1, 0, Stream::user);
    WeightedAccumulator all, a, b, c;
    for (int i = 0; i < 3000; ++i)
    {
        double const y = 100 + uniform01(rng);
        double const w = exponential1(rng);
        all.add(y, w);
        (i < 1000 ? a : i < 1700 ? b : c).add(y, w);
    }
    a.merge(b);
    a.merge(c);
    auto const x = all.estimate(), z = a.estimate();
    EXPECT_EQ(a.count(), all.count());
    EXPECT_NEAR(x.mean, z.mean, 1e-12);
    EXPECT_NEAR(x.std_error, z.std_error, 1e-12 * x.std_error);
    EXPECT_NEAR(x.effective_n, z.effective_n, 1e-9);
}

TEST(WeightedAccumulator, MatchesTwoPass)
{
    StreamEngine rng(2, 0, Stream::user);
    std::vector<WeightedSample> s;
    WeightedAccumulator acc;
    for (int i = 0; i < 500; ++i)
    {
        WeightedSample x{uniform01(rng), uniform01(rng)};
        s.push_back(x);
        acc.add(x.value, x.weight);
    }
    auto const a = acc.estimate(), b = weighted_mean_ci(s);
    EXPECT_NEAR(a.mean, b.mean, 1e-14);
    EXPECT_NEAR(a.std_error, b.std_error, 1e-12);
}

// The delta-method error of the self-normalized mean against a bootstrap
TEST(WeightedAccumulator, StdErrorAgreesWithBootstrap)
{
    std::mt19937_64 gen(5);
    std::exponential_distribution<double> ew(1.0);
    std::normal_distribution<double> ny(0, 1);
    std::vector<WeightedSample> s;
    for (int i = 0; i < 2000; ++i)
    {
        double const w = ew(gen);
        s.push_back({std::sin(w) + 0.5 * ny(gen), w});
    }
    double const se = weighted_mean_ci(s).std_error;
    std::uniform_int_distribution<std::size_t> pick(0, s.size() - 1);
    WeightedAccumulator boot;
    for (int b = 0; b < 2000; ++b)
    {
        double sw = 0, swy = 0;
        for (std::size_t i = 0; i < s.size(); ++i)
        {
            auto const& x = s[pick(gen)];
            sw += x.weight;
            swy += x.weight * x.value;
        }
        boot.add(swy / sw);
    }
    auto const bs = boot.estimate();
    double const boot_sd = bs.std_error * std::sqrt(double(bs.n));
    EXPECT_NEAR(se / boot_sd, 1, 0.08);
}

TEST(WeightedAccumulator, Degenerate)
{
    WeightedAccumulator acc;
    acc.add(1, 0);
    acc.add(2, 0);
    EXPECT_THROW(acc.estimate(), StatisticalError);
    WeightedAccumulator one;
    one.add(1);
    EXPECT_THROW(one.estimate(), StatisticalError);
    EXPECT_THROW(acc.add(1, -1), DomainError);
}

TEST(Compare, BandIsMultiplierTimesStdError)
{
    EstimateWithCI e;
    e.mean = 1.2;
    e.std_error = 0.1;
    e.half_width = 0.3;
    e.n = 10;
    EXPECT_TRUE(compare("x", e, 1.0).pass);
    EXPECT_FALSE(compare("x", e, 0.85).pass);
    auto const j = to_json(compare("x", e, 1.0, 9));
    EXPECT_EQ(j["stderr"], 0.1);
    EXPECT_EQ(j["seed"], 9);
}

TEST(MartingaleCheck, RefusesSupercritical)
{
    EXPECT_THROW(martingale_check({{1.0}, {1.0}}, -0.5, 1, {1}), DomainError);
}

namespace
{
// Homogeneous Poisson process of rate lambda on [0,1] with sizes uniform on [0,2)
std::vector<std::vector<std::pair<double, double>>> poisson_paths(int n, double lambda, std::uint64_t seed)
{
    std::mt19937_64 gen(seed);
    std::poisson_distribution<int> count(lambda);
    std::uniform_real_distribution<double> u01(0, 1);
    std::vector<std::vector<std::pair<double, double>>> out(n);
    for (auto& p : out)
    {
        int const k = count(gen);
        for (int i = 0; i < k; ++i)
            p.emplace_back(u01(gen), 2 * u01(gen));
    }
    return out;
}
}  // namespace

TEST(Campbell, PoissonProcessHitsTarget)
{
    auto const atoms = poisson_paths(5000, 3, 1);
    std::vector<std::vector<double>> sizes;
    for (auto const& p : atoms)
    {
        sizes.emplace_back();
        for (auto [t, r] : p)
            sizes.back().push_back(r);
    }
    // E sum f(r) = 3 * E[r^2] = 3 * 4/3
    auto const rep = campbell_check(sizes, {}, [](double r) { return r * r; }, 4.0);
    EXPECT_TRUE(rep.pass) << rep.estimate;
    auto const bad = campbell_check(sizes, {}, [](double r) { return r * r; }, 4.5);
    EXPECT_FALSE(bad.pass);
}

TEST(BoxTest, PoissonPassesAndCorrelatedFails)
{
    auto const atoms = poisson_paths(5000, 4, 2);
    std::vector<Box> const boxes = {{0, 0.5, 0, 1}, {0, 0.5, 1, 2}, {0.5, 1, 0, 1}, {0.5, 1, 1, 2}};
    auto const ok = poisson_box_test(atoms, boxes, {1, 1, 1, 1});
    EXPECT_TRUE(ok.pass);
    EXPECT_EQ(ok.corr.size(), 16u);

    // Duplicate every atom in box 0 into box 3: counts become correlated
    std::vector<std::vector<double>> counts;
    for (auto const& p : atoms)
    {
        std::vector<double> c(4, 0);
        for (auto [t, r] : p)
            for (int b = 0; b < 4; ++b)
                c[b] += boxes[b].contains(t, r);
        c[3] = c[0];
        counts.push_back(c);
    }
    auto const bad = poisson_box_test_counts(counts, {1, 1, 1, 1});
    EXPECT_FALSE(bad.pass);
    auto const shifted = poisson_box_test(atoms, boxes, {1, 1, 1, 1.3});
    EXPECT_FALSE(shifted.pass);
}
