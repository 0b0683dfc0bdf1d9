#pragma once

#include <array>
#include <string>
#include <vector>

#include "csbp/mechanism.hpp"

namespace csbp
{
//---------------------------------------------------------------------------//
/*!
 * Dense solution of du/dt = -psi(u), u(0) = theta.
 *
 * Dormand-Prince 5(4) with the standard fourth-order continuous extension,
 * so u can be evaluated anywhere on [0, t_end] without re-solving.
 */
class USolution
{
  public:
    struct Options
    {
        double rtol{1e-10};
        double atol{1e-300};
        std::size_t max_steps{1000000};
    };

    USolution(BranchingMechanism const& mech,
              double theta,
              double t_end,
              Options const& opts);
    USolution(BranchingMechanism const& mech, double theta, double t_end)
        : USolution(mech, theta, t_end, Options{})
    {
    }

    double theta() const { return theta_; }
    double t_end() const { return t_end_; }
    std::size_t num_steps() const { return steps_.size(); }

    //! u at time t in [0, t_end], clamped to be nonnegative
    double operator()(double t) const;

    /*!
     * Integral of phi(u_s) over s in [0, t] by 10-point Gauss-Legendre
     * on each accepted solver step.
     */
    double phi_integral(BranchingMechanism const& mech, double t) const;

  private:
    struct Step
    {
        double t0;
        double h;
        std::array<double, 5> rc;
    };

    double eval(Step const& s, double t) const;
    Step const& locate(double t) const;

    double theta_;
    double t_end_;
    std::vector<Step> steps_;
};

//! Values of u_t(theta) on a user grid.
struct UCurve
{
    double theta{0};
    std::vector<double> times;
    std::vector<double> values;
    //! Relative local error tolerance the solver was run with
    double tolerance{0};
};

UCurve solve_u(BranchingMechanism const& mech,
               double theta,
               std::vector<double> const& t_grid);

//---------------------------------------------------------------------------//
//! Families whose ODE separates into elementary functions.
struct ClosedFormFamily
{
    enum class Kind
    {
        quadratic,  //!< psi = l^2
        stable,  //!< psi = l^alpha
        linear_quadratic  //!< psi = b l + c l^2
    };
    Kind kind{Kind::quadratic};
    double alpha{2};
    double b{1};
    double c{1};

    static ClosedFormFamily quadratic() { return {}; }
    static ClosedFormFamily stable(double alpha)
    {
        return {Kind::stable, alpha, 1, 1};
    }
    static ClosedFormFamily linear_quadratic(double b, double c)
    {
        return {Kind::linear_quadratic, 2, b, c};
    }
};

double closed_form_u(ClosedFormFamily const& family, double theta, double t);

//! Limit of closed_form_u as theta -> inf.
double closed_form_u_infinity(ClosedFormFamily const& family, double t);

//---------------------------------------------------------------------------//

//! E_x exp(-theta Z_t) = exp(-x u_t(theta))
double csbp_laplace(BranchingMechanism const& mech,
                    double x,
                    double theta,
                    double t);

//! E_x^up exp(-theta Z_t) = exp(-x u_t(theta) - int_0^t phi(u_s(theta)) ds)
double qprocess_laplace(BranchingMechanism const& mech,
                        double x,
                        double theta,
                        double t);

//! Result of the theta -> inf extrapolation for u_t(inf).
struct UInfinity
{
    double value{0};
    std::vector<double> thetas;
    std::vector<double> values;
    //! "direct" when raw ladder values settled, "aitken" otherwise
    std::string method;
};

/*!
 * u_t(inf) from solve_u along theta = 1e2, 1e3, ...
 *
 * Accepts as soon as two consecutive ladder values agree to 1e-6
 * relative; otherwise Aitken delta-squared on consecutive triples, accepted
 * when two consecutive extrapolants agree to 1e-6. Throws NumericalError if
 * neither settles by theta = 1e16.
 */
UInfinity u_infinity(BranchingMechanism const& mech, double t);

//! P_x(T > t) = 1 - exp(-x u_t(inf))
double survival_probability(BranchingMechanism const& mech, double x, double t);

/*!
 * E_x[exp(-theta Z_t) | T > t + s] for finite s.
 *
 * Equal to (e^{-x u_t(theta)} - e^{-x u_t(theta + u_s(inf))})
 * / (1 - e^{-x u_{t+s}(inf)}); converges to qprocess_laplace as s -> inf.
 */
double survival_conditioned_laplace(BranchingMechanism const& mech,
                                    double x,
                                    double theta,
                                    double t,
                                    double s);

}  // namespace csbp
