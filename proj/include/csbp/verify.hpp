#pragma once

#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "csbp/config.hpp"
#include "csbp/stats.hpp"

namespace csbp
{
//! Groups of reference checks run by `verify`.
enum class Suite
{
    laplace,  //!< ODE against closed forms, semigroup property
    martingale,  //!< CSBP Laplace transform and e^{rho t} Z_t
    qprocess,  //!< Q-process laws, the three conditioning routes, B-up
    marking,  //!< retained and immigrant atoms under the h-transform
    lamperti,  //!< time-change round trip and time-changed laws
    stable  //!< theta-atoms and the Z^{1/alpha} dX + dS split
};

char const* to_string(Suite s);
//! Throws ConfigError("suite", ...) for an unknown name.
Suite suite_from_string(std::string const& name);
std::vector<Suite> all_suites();

struct SuiteReport
{
    Suite suite{Suite::laplace};
    //! Each check carries extra["criterion"], the acceptance item it backs
    std::vector<CheckReport> checks;
    nlohmann::json meta = nlohmann::json::object();
    bool pass() const;
};

nlohmann::json to_json(SuiteReport const& r);

/*!
 * Run one suite with the ensemble sizes, seed, thread count, dt and eps of
 * cfg. The benchmark mechanisms are fixed by the suite; cfg.mechanism is
 * not used. Output depends on cfg.seed but not on cfg.threads.
 */
SuiteReport run_verify(Suite suite, RunConfig const& cfg);

}  // namespace csbp
