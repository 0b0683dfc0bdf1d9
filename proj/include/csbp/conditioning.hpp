#pragma once

#include <functional>
#include <span>
#include <vector>

#include "csbp/simulate.hpp"
#include "csbp/stats.hpp"

namespace csbp
{
//! D_t = e^{rho t} Z_t / x; zero once the path is absorbed.
double hweight(SimPath const& path, BranchingMechanism const& mech, double t);

using PathFunctional = std::function<double(SimPath const&)>;

//! E-up[F] estimated as the self-normalized mean of F weighted by D_t.
EstimateWithCI importance_expectation(std::span<SimPath const> paths,
                                      BranchingMechanism const& mech,
                                      double t,
                                      PathFunctional const& f,
                                      double multiplier = 3);

//! Per-path martingale check on Z at each time of t_grid.
std::vector<CheckReport> martingale_check(std::span<SimPath const> paths,
                                          BranchingMechanism const& mech,
                                          std::vector<double> const& t_grid,
                                          double multiplier = 3);

struct SurvivalEstimate
{
    double s{0};
    EstimateWithCI estimate;
    std::size_t n_total{0};
    std::size_t n_accepted{0};
    double acceptance_rate{0};
    //! Binomial standard error of the acceptance rate
    double acceptance_stderr{0};
    //! P_x(T > t + s) from the Laplace oracle
    double acceptance_oracle{0};
};

/*!
 * E[F | T > t + s] by rejection: simulate N unconditioned paths to t + s and
 * keep those not absorbed by then. Throws StatisticalError if none survive.
 */
SurvivalEstimate
survival_conditioned_expectation(BranchingMechanism const& mech,
                                 double x,
                                 double t,
                                 double s,
                                 PathFunctional const& f,
                                 std::size_t n,
                                 SimConfig const& config,
                                 unsigned threads = 1,
                                 double multiplier = 3);

/*!
 * The same estimator for every s in the ladder from one ensemble run to
 * t + max(s): acceptance sets are nested, so the table is a coupled
 * convergence study rather than independent runs.
 */
std::vector<SurvivalEstimate>
survival_conditioned_ladder(BranchingMechanism const& mech,
                            double x,
                            double t,
                            std::vector<double> const& s_ladder,
                            PathFunctional const& f,
                            std::size_t n,
                            SimConfig const& config,
                            unsigned threads = 1,
                            double multiplier = 3);

//! The s-ladder scaled by 1/rho for subcritical mechanisms.
std::vector<double> default_s_ladder(BranchingMechanism const& mech);

//---------------------------------------------------------------------------//
enum class MarkKind : std::uint8_t
{
    retained,  //!< Delta_n = (r_n, nu_n), delta_n = 0
    immigrant,  //!< Delta_n = 0, delta_n = r_n 1{nu_n <= Z_{t_n-}}
    null  //!< both zero (Z_{t_n} = 0)
};

char const* to_string(MarkKind k);

struct MarkedAtom
{
    double t{0};
    MarkKind kind{MarkKind::null};
    double r{0};
    double nu{0};
    //! delta_n; nonzero only for immigrants
    double delta{0};
    //! Whether the atom changed the state (nu_n <= Z_{t_n-})
    bool applied{false};
};

/*!
 * Marking rule applied to every branching atom of a CSBP path:
 * immigrant iff u_n > Z_{t_n-}/Z_{t_n} and Z_{t_n} > 0, retained iff
 * u_n <= Z_{t_n-}/Z_{t_n}, null iff Z_{t_n} = 0.
 */
std::vector<MarkedAtom> mark_jumps(SimPath const& path);

struct GirsanovResidual
{
    std::vector<double> times;
    //! B-up increments over (times[i-1], times[i]]; entry 0 is 0
    std::vector<double> increments;
    double total{0};
};

/*!
 * B-up = B - sigma int Z^{-1/2} ds with a trapezoid on left limits, up to
 * t_end. Throws DomainError naming the first epoch where Z <= 0.
 */
GirsanovResidual girsanov_residual(SimPath const& path,
                                   BranchingMechanism const& mech,
                                   double t_end);

}  // namespace csbp
