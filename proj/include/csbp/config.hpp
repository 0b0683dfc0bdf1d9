#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "csbp/mechanism.hpp"
#include "csbp/simulate.hpp"

namespace csbp
{
struct LaplaceOptions
{
    std::vector<double> thetas{1};
    std::vector<double> times{0, 0.25, 0.5, 0.75, 1};
};

struct ConditionOptions
{
    std::string mode{"weight"};  //!< weight | mark | reject
    double t{1};
    double s{20};
    double theta{1};
};

struct LampertiOptions
{
    std::string direction{"roundtrip"};  //!< lz | zl | roundtrip
    double t_max{1};
};

struct VerifySettings
{
    std::size_t paths{100000};
    std::size_t survival_paths{400000};
    std::vector<double> s_ladder{1, 2, 5, 10, 20, 50, 100};
    std::size_t roundtrip_paths{200};
};

/*!
 * Everything a CLI run needs. Every field has an explicit default, so a
 * file containing only a mechanism is complete after parsing.
 */
struct RunConfig
{
    BranchingMechanism mechanism{-1, 1.4142135623730951};
    double x{1};
    SimConfig sim;
    std::uint64_t seed{0};
    std::size_t paths{1000};
    unsigned threads{1};
    double multiplier{3};
    std::string out_dir{"."};
    LaplaceOptions laplace;
    ConditionOptions condition;
    LampertiOptions lamperti;
    VerifySettings verify;
};

/*!
 * Parse and validate a JSON document. Unknown keys are rejected; errors
 * are ConfigError with the dotted path of the offending field.
 */
RunConfig parse_config(std::string_view bytes);
RunConfig config_from_json(nlohmann::json const& j);
nlohmann::json to_json(RunConfig const& cfg);

nlohmann::json to_json(SimConfig const& sim);

}  // namespace csbp
