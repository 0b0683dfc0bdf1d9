#include <gtest/gtest.h>

#include "csbp/config.hpp"
#include "csbp/error.hpp"

using namespace csbp;

namespace
{
std::string field_of(std::string const& text)
{
    try
    {
        parse_config(text);
    }
    catch (ConfigError const& e)
    {
        return e.field();
    }
    return "<no error>";
}
}  // namespace

TEST(Config, MinimalFellerGetsDefaults)
{
    auto const cfg = parse_config(R"({"mechanism": {"a": -1, "sigma": 1.4142135623730951}})");
    EXPECT_EQ(cfg.sim.dt, 1e-3);
    EXPECT_EQ(cfg.sim.eps, 1e-2);
    EXPECT_EQ(cfg.multiplier, 3);
    EXPECT_EQ(cfg.x, 1);
    EXPECT_EQ(cfg.sim.truncation, Truncation::absolute);
    EXPECT_EQ(cfg.verify.s_ladder.back(), 100);
    EXPECT_DOUBLE_EQ(cfg.mechanism.rho(), 1);
}

TEST(Config, RoundTripIsLossless)
{
    auto const cfg = parse_config(R"({
        "mechanism": {"a": -2, "sigma": 0, "levy": {"kind": "stable", "k": 1, "alpha": 1.5}},
        "x": 0.25, "seed": 99, "threads": 4,
        "sim": {"dt": 5e-4, "truncation": "stable_scaled", "scale_reference": 100,
                "small_jumps": "gaussian", "record_thinned": true},
        "condition": {"mode": "mark", "s": 7},
        "verify": {"paths": 5000, "s_ladder": [1, 4]}
    })");
    auto const j = to_json(cfg);
    auto const back = config_from_json(j);
    EXPECT_EQ(to_json(back), j);
    EXPECT_EQ(back.sim.truncation, Truncation::stable_scaled);
    EXPECT_EQ(back.sim.small_jumps, SmallJumps::gaussian);
    EXPECT_EQ(back.condition.mode, "mark");
    EXPECT_EQ(back.verify.s_ladder, (std::vector<double>{1, 4}));
    EXPECT_EQ(back.seed, 99u);
}

TEST(Config, ErrorsNameTheField)
{
    EXPECT_EQ(field_of(R"({"mechanism": {"a": 0, "sigma": -1}})"), "mechanism.sigma");
    EXPECT_EQ(field_of(R"({"mechanism": {"a": 0, "sigma": 0,
                         "levy": {"kind": "stable", "k": 1, "alpha": 2.5}}})"),
              "mechanism.levy.alpha");
    EXPECT_EQ(field_of(R"({"mechanism": {"a": 0, "sigma": 1}, "sim": {"dt": -1}})"), "sim.dt");
    EXPECT_EQ(field_of(R"({"mechanism": {"a": 0, "sigma": 1}, "sim": {"step": 1}})"), "sim.step");
    EXPECT_EQ(field_of(R"({"mechanism": {"a": 0, "sigma": 1}, "colour": 1})"), "colour");
    EXPECT_EQ(field_of(R"({"mechanism": {"a": 0, "sigma": 1}, "sim": {"small_jumps": "keep"}})"),
              "sim.small_jumps");
    EXPECT_EQ(field_of(R"({"mechanism": {"a": 0, "sigma": 1}, "seed": -3})"), "seed");
    EXPECT_EQ(field_of(R"({"mechanism": {"a": 0, "sigma": 1}, "verify": {"s_ladder": [1, "x"]}})"),
              "verify.s_ladder[1]");
    EXPECT_EQ(field_of(R"({"x": 1})"), "mechanism");
    EXPECT_EQ(field_of(R"({"mechanism": )"), "<document>");
}
