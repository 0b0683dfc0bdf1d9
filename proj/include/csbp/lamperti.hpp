#pragma once

#include <limits>
#include <vector>

#include "csbp/simulate.hpp"

namespace csbp
{
/*!
 * Matched clocks of a Lamperti transform.
 *
 * source_times[i] maps to target_times[i]; clock_integral[i] is the
 * accumulated integral (of 1/X for Levy -> CSBP, of Z for CSBP -> Levy),
 * which equals target_times[i] in the first direction and is the Levy time
 * in the second.
 */
struct TimeChange
{
    std::vector<double> source_times;
    std::vector<double> target_times;
    std::vector<double> clock_integral;
    //! Target time of absorption (T for Z, T_0 for X); inf if not reached
    double absorbed_at{std::numeric_limits<double>::infinity()};
};

/*!
 * Z_t = X_{theta_t ^ T_0} with theta_t the first time the trapezoidal
 * integral of 1/X (left limits at jump epochs) exceeds t.
 *
 * Mapping stops once the clock exceeds t_max (first exceedance). X below
 * x * 1e-9 counts as absorbed; the last interval then uses a left-point
 * clock increment.
 */
SimPath levy_to_csbp(SimPath const& xpath,
                     double t_max = std::numeric_limits<double>::infinity(),
                     TimeChange* clock = nullptr);

/*!
 * X_t = Z_{phi_t ^ T} with phi_t the first time the trapezoidal integral
 * of Z exceeds t; the output stops where the clock is exhausted.
 */
SimPath csbp_to_levy(SimPath const& zpath, TimeChange* clock = nullptr);

struct RoundTripReport
{
    //! max over matched knots of |phi(theta(s_i)) - s_i|
    double sup_time_error{0};
    //! max over matched knots of the value difference
    double sup_value_error{0};
    std::size_t knots{0};
};

//! Compare X with csbp_to_levy(levy_to_csbp(X)) on [0, T_0].
RoundTripReport lamperti_round_trip(SimPath const& xpath);

//---------------------------------------------------------------------------//

struct ThetaAtom
{
    double t{0};
    double theta{0};
};

/*!
 * theta_n = r_n / Z_{t_n-}^{1/alpha} for the applied branching atoms of a
 * stable Q-process path; thinned and immigration atoms are skipped.
 */
std::vector<ThetaAtom> stable_theta_atoms(SimPath const& qpath,
                                          BranchingMechanism const& mech);

/*!
 * Per-interval split of a stable Q-process path into dZ = Z^{1/alpha} dX
 * + dS. X collects the theta jumps, the compensator of theta-jumps below 1
 * and the Gaussian small-jump term; S collects the immigration jumps and
 * the mean of the dropped small immigrants.
 */
struct StableDecomposition
{
    std::vector<double> times;
    std::vector<double> dx;
    std::vector<double> ds;
    //! Z_t - x - int Z^{1/alpha} dX - S_t at each knot
    std::vector<double> residual;
    double max_abs_residual{0};
    double s_total{0};
    //! Sum of the immigration jump sizes
    double s_jump_total{0};
    std::size_t x_jumps{0};
    std::size_t s_jumps{0};
    //! True if some epoch carries both an X and an S jump
    bool simultaneous_jumps{false};
};

/*!
 * Requires Pi = k r^{-1-alpha}, sigma = 0 and a = -k / (alpha - 1), the
 * case where the linear terms cancel in the reduction.
 */
StableDecomposition stable_decompose(SimPath const& qpath,
                                     BranchingMechanism const& mech);

}  // namespace csbp
