#pragma once

#include <optional>
#include <string>
#include <variant>

#include <nlohmann/json_fwd.hpp>

#include "csbp/rng.hpp"

namespace csbp
{
//! Which measure a tail rate or sampler refers to: Pi(dr) or r Pi(dr).
enum class JumpWeight
{
    plain,
    size_biased
};

//---------------------------------------------------------------------------//
/*!
 * Parametric Levy measure on (0, inf).
 *
 * Three closed families: the null measure, the stable measure with density
 * k r^{-(alpha+1)} (1 < alpha < 2), and exponentially decaying jumps with
 * density c e^{-b r}. Each family has exact moments, tail rates and
 * inverse-CDF samplers, so nothing in a simulation loop needs quadrature.
 */
class LevyMeasure
{
  public:
    struct Zero
    {
    };
    struct Stable
    {
        double k;
        double alpha;
    };
    struct ExponentialJumps
    {
        double c;
        double b;
    };
    using Variant = std::variant<Zero, Stable, ExponentialJumps>;

    LevyMeasure() = default;

    static LevyMeasure zero() { return {}; }
    static LevyMeasure stable(double k, double alpha);
    static LevyMeasure exponential_jumps(double c, double b);

    Variant const& variant() const { return v_; }
    bool is_zero() const { return std::holds_alternative<Zero>(v_); }
    Stable const* as_stable() const { return std::get_if<Stable>(&v_); }

    //! Density of Pi with respect to Lebesgue measure at r > 0
    double density(double r) const;

    /*!
     * Signed partial moment: integral of r^p Pi(dr) over [lo, hi).
     *
     * Returns minus the [hi, lo) moment when lo > hi, and +inf when the
     * integral diverges (e.g. p <= alpha near zero for the stable family).
     */
    double moment(int p, double lo, double hi) const;

    //! Pi([eps, inf)) or the size-biased tail integral of r Pi(dr)
    double tail_rate(double eps, JumpWeight weight) const;

    //! Inverse CDF of the chosen measure restricted to [eps, inf)
    double quantile(double eps, JumpWeight weight, double u) const;

    //! Integral of (e^{-lr} - 1 + l r 1{r<1}) Pi(dr), closed form
    double psi_jump_part(double lambda) const;

    //! Integral of r (1 - e^{-lr}) Pi(dr): the jump part of psi'(l) - psi'(0)
    double psi_prime_jump_increment(double lambda) const;

    std::string describe() const;

  private:
    explicit LevyMeasure(Variant v) : v_(v) {}

    Variant v_{Zero{}};
};

//---------------------------------------------------------------------------//
//! Sign of rho = psi'(0+).
enum class Criticality
{
    subcritical,
    critical,
    supercritical
};

char const* to_string(Criticality c);

//---------------------------------------------------------------------------//
/*!
 * Branching mechanism psi with killing rate q = 0:
 *
 *   psi(l) = -a l + sigma^2 l^2 / 2 + int (e^{-lr} - 1 + l r 1{r<1}) Pi(dr).
 *
 * Immutable after construction; safe to share between threads.
 */
class BranchingMechanism
{
  public:
    BranchingMechanism(double a, double sigma, LevyMeasure levy = {});

    double a() const { return a_; }
    double sigma() const { return sigma_; }
    LevyMeasure const& levy() const { return levy_; }

    //! psi'(0+); finite for every constructible mechanism
    double rho() const { return rho_; }

  private:
    double a_;
    double sigma_;
    LevyMeasure levy_;
    double rho_;
};

//! Stable mechanism scaled so that psi(l) = l^alpha exactly.
BranchingMechanism normalized_stable_mechanism(double alpha);

//! Stable Levy measure with no linear term: psi(l) = k Gamma(-alpha) l^alpha.
BranchingMechanism pure_stable_mechanism(double k, double alpha);

//---------------------------------------------------------------------------//
// Operations

double psi_eval(BranchingMechanism const& mech, double lambda);
double psi_prime(BranchingMechanism const& mech, double lambda);
Criticality classify(BranchingMechanism const& mech);
double phi_eval(BranchingMechanism const& mech, double theta);

//! Slow path of psi_eval: adaptive quadrature of the Levy integral.
double psi_quadrature(BranchingMechanism const& mech, double lambda);
//! Slow path of psi_prime.
double psi_prime_quadrature(BranchingMechanism const& mech, double lambda);

double levy_tail_rate(LevyMeasure const& levy, double eps, JumpWeight weight);

double sample_levy_jump(LevyMeasure const& levy,
                        double eps,
                        JumpWeight weight,
                        StreamEngine& rng);

struct RegularityReport
{
    //! psi(0) = 0 and |psi'(0+)| < inf (sufficient condition only)
    bool conservative{false};
    //! Grey condition at infinity; empty for supercritical input
    std::optional<bool> almost_sure_extinction;
    //! Lower limit used for the integral of 1/psi
    double lambda_start{0};
    //! Integral of 1/psi from lambda_start to infinity (inf if divergent)
    double extinction_integral{0};
};

RegularityReport check_regularity(BranchingMechanism const& mech);

//---------------------------------------------------------------------------//
// JSON form: {"a": n, "sigma": n, "levy": {"kind": "zero"|"stable"|"expjumps",
// ...}} with "k","alpha" for stable and "c","b" for expjumps.

nlohmann::json to_json(BranchingMechanism const& mech);
//! Throws ConfigError naming the field path (prefix + ".sigma", ...).
BranchingMechanism mechanism_from_json(nlohmann::json const& j,
                                       std::string const& prefix
                                       = "mechanism");

}  // namespace csbp
