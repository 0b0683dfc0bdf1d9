#pragma once

#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "csbp/mechanism.hpp"

namespace csbp
{
//! How the jump cutoff c is chosen on each Euler substep.
enum class Truncation
{
    absolute,  //!< c = eps
    //! c = eps * max(1, Z / scale_reference)^{1/alpha}; stable measures only
    stable_scaled
};

//! Treatment of compensated jumps below the cutoff.
enum class SmallJumps
{
    drop,
    gaussian  //!< replaced by a Brownian term with matching variance
};

struct SimConfig
{
    double horizon{1};
    double dt{1e-3};
    double eps{1e-2};
    std::uint64_t seed{0};
    std::uint64_t path_index{0};
    std::size_t max_jumps{2000000};
    Truncation truncation{Truncation::absolute};
    double scale_reference{1};
    SmallJumps small_jumps{SmallJumps::drop};
    //! Candidate epochs use the bound margin * Z at substep start (>= 1)
    double thinning_margin{2};
    //! Keep thinned (rejected) candidates in SimPath::atoms
    bool record_thinned{false};

    //! Throws ConfigError naming the offending field ("sim.dt", ...)
    void validate() const;
};

char const* to_string(Truncation t);
char const* to_string(SmallJumps s);

//! Which Poisson measure produced an atom.
enum class AtomSource : std::uint8_t
{
    branching,  //!< N(ds, dnu, dr): the CSBP jumps (N-up in the Q-process)
    immigration,  //!< N-star(ds, dr): size-biased immigration
    levy  //!< jumps of the raw Levy process
};

struct JumpAtom
{
    double t{0};
    //! Selection coordinate on [0, bound]; 0 for sources without one
    double nu{0};
    double r{0};
    //! Uniform mark on [0, 1]
    double u{0};
    double z_before{0};
    double z_after{0};
    AtomSource source{AtomSource::branching};
    //! False for thinned candidates (nu > z_before)
    bool applied{true};
};

enum class PathKind : std::uint8_t
{
    csbp,
    qprocess,
    levy,
    time_changed
};

char const* to_string(PathKind k);

/*!
 * Simulated trajectory on the union of the Euler grid and jump epochs.
 *
 * Knot i carries the value at times[i], the left limit just before it
 * (different only at jump epochs) and the driving increments over
 * (times[i-1], times[i]]. Knot 0 holds the initial value with zero
 * increments.
 */
struct SimPath
{
    static constexpr double never = std::numeric_limits<double>::infinity();

    PathKind kind{PathKind::csbp};
    double x0{0};
    SimConfig config;

    std::vector<double> times;
    std::vector<double> values;
    std::vector<double> left_values;
    std::vector<double> brownian_increments;
    std::vector<double> small_jump_increments;
    std::vector<JumpAtom> atoms;

    //! First time the path is absorbed at 0 (CSBP) or stopped (Levy)
    double absorption_time{never};
    //! Q-process only: first time the Euler scheme clamped the state at 0
    double zero_hit_time{never};
    //! Time actually simulated (may stop before the horizon)
    double end_time{0};

    std::size_t size() const { return times.size(); }
    //! Right-continuous value at t (last knot at or before t)
    double value_at(double t) const;
    //! Left limit at t (value on the last knot strictly before t)
    double left_limit_at(double t) const;
    bool absorbed_by(double t) const { return absorption_time <= t; }
};

//! Optional early stop for simulate_levy.
struct LevyStop
{
    //! Stop at the first (discretely detected) passage below 0
    bool at_zero{false};
    //! Stop once the integral of 1/X exceeds this value
    double clock_limit{std::numeric_limits<double>::infinity()};
    /*!
     * If positive, cap every substep at clock_step * X so the integral of
     * 1/X advances by about clock_step per step; 0 keeps the fixed grid.
     */
    double clock_step{0};
};

SimPath simulate_csbp(BranchingMechanism const& mech,
                      double x,
                      SimConfig const& config);

SimPath simulate_qprocess(BranchingMechanism const& mech,
                          double x,
                          SimConfig const& config);

SimPath simulate_levy(BranchingMechanism const& mech,
                      double x0,
                      SimConfig const& config,
                      LevyStop const& stop = {});

//---------------------------------------------------------------------------//
// Path export

/*!
 * Binary dump, little-endian:
 *   char[8]  "CSBPPTH1"
 *   u8 kind, u8 truncation, u8 small_jumps, u8 record_thinned
 *   u64 seed, f64 thinning_margin, f64 scale_reference, u64 path_index,
 *   u64 max_jumps
 *   f64 x0, horizon, dt, eps, absorption_time, zero_hit_time, end_time
 *   u64 n_knots, then per knot f64 t, value, left, dB, dW_small
 *   u64 n_atoms, then per atom f64 t, nu, r, u, z_before, z_after,
 *       u8 source, u8 applied, u8[6] padding
 */
void write_path_binary(std::ostream& os, SimPath const& path);
SimPath read_path_binary(std::istream& is);

//! CSV with header t,value,is_jump,r,nu,u (one row per knot).
void write_path_csv(std::ostream& os, SimPath const& path);

}  // namespace csbp
