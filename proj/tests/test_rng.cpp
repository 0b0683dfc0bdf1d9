#include <gtest/gtest.h>

#include <cmath>
#include <set>

#include "csbp/rng.hpp"

using namespace csbp;

// Known-answer vectors of the reference Philox4x32-10 implementation
TEST(Philox, KnownAnswers)
{
    using C = Philox4x32::Counter;
    using K = Philox4x32::Key;
    EXPECT_EQ(Philox4x32::apply(C{0, 0, 0, 0}, K{0, 0}),
              (C{0x6627e8d5, 0xe169c58d, 0xbc57ac4c, 0x9b00dbd8}));
    EXPECT_EQ(Philox4x32::apply(C{0xffffffff, 0xffffffff, 0xffffffff, 0xffffffff},
                                K{0xffffffff, 0xffffffff}),
              (C{0x408f276d, 0x41c83b0e, 0xa20bc7c6, 0x6d5451fd}));
    EXPECT_EQ(Philox4x32::apply(C{0x243f6a88, 0x85a308d3, 0x13198a2e, 0x03707344},
                                K{0xa4093822, 0x299f31d0}),
              (C{0xd16cfe09, 0x94fdcceb, 0x5001e420, 0x24126ea1}));
}

TEST(StreamEngine, SameAddressSameSequence)
{
    StreamEngine a(7, 3, Stream::brownian);
    StreamEngine b(7, 3, Stream::brownian);
    for (int i = 0; i < 100; ++i)
        ASSERT_EQ(a(), b());
}

TEST(StreamEngine, StreamsPathsAndSeedsAreDisjoint)
{
    std::set<std::uint64_t> first;
    for (std::uint64_t seed : {0u, 1u})
        for (std::uint64_t path : {0u, 1u, 1000u})
            for (Stream s : {Stream::brownian, Stream::jump_sizes, Stream::marks})
                first.insert(StreamEngine(seed, path, s)());
    EXPECT_EQ(first.size(), 18u);
}

TEST(StreamEngine, RejectsWidePathIndex)
{
    EXPECT_ANY_THROW(StreamEngine(0, std::uint64_t{1} << 33, Stream::brownian));
}

TEST(Variates, MomentsMatch)
{
    constexpr int n = 400000;
    StreamEngine u(11, 0, Stream::user);
    StreamEngine e(11, 1, Stream::user);
    NormalStream g(11, 2, Stream::user);
    double su = 0, su2 = 0, se = 0, sg = 0, sg2 = 0, sg4 = 0;
    for (int i = 0; i < n; ++i)
    {
        double const x = uniform01(u);
        ASSERT_GE(x, 0.0);
        ASSERT_LT(x, 1.0);
        su += x;
        su2 += x * x;
        se += exponential1(e);
        double const z = g();
        sg += z;
        sg2 += z * z;
        sg4 += z * z * z * z;
    }
    EXPECT_NEAR(su / n, 0.5, 4 * std::sqrt(1.0 / 12 / n));
    EXPECT_NEAR(su2 / n, 1.0 / 3, 4 * std::sqrt(4.0 / 45 / n));
    EXPECT_NEAR(se / n, 1.0, 4 / std::sqrt(double(n)));
    EXPECT_NEAR(sg / n, 0.0, 4 / std::sqrt(double(n)));
    EXPECT_NEAR(sg2 / n, 1.0, 4 * std::sqrt(2.0 / n));
    EXPECT_NEAR(sg4 / n, 3.0, 4 * std::sqrt(96.0 / n));
}

TEST(Variates, OpenLowNeverZero)
{
    StreamEngine u(0, 0, Stream::user);
    for (int i = 0; i < 100000; ++i)
        ASSERT_GT(uniform01_open_low(u), 0.0);
}
