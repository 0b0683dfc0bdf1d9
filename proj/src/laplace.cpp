#include "csbp/laplace.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/gauss.hpp>

#include "csbp/error.hpp"

namespace csbp
{
namespace
{
// Dormand-Prince 5(4) tableau
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187,
                 a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// continuous extension (Hairer, Norsett & Wanner)
constexpr double d1 = -12715105075.0 / 11282082432.0,
                 d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0,
                 d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0,
                 d7 = 69997945.0 / 29380423.0;

void check_subcritical(BranchingMechanism const& mech)
{
    if (classify(mech) == Criticality::supercritical)
        throw DomainError("supercritical mechanisms are unsupported");
}

}  // namespace

//---------------------------------------------------------------------------//

USolution::USolution(BranchingMechanism const& mech,
                     double theta,
                     double t_end,
                     Options const& opts)
    : theta_(theta), t_end_(t_end)
{
    if (!(theta >= 0) || !std::isfinite(theta))
        throw DomainError("solve_u: theta must be finite and nonnegative");
    if (!(t_end >= 0) || !std::isfinite(t_end))
        throw DomainError("solve_u: end time must be finite and nonnegative");
    check_subcritical(mech);

    auto f = [&mech](double u) { return -psi_eval(mech, std::max(u, 0.0)); };

    double t = 0;
    double y = theta;
    if (t_end == 0 || theta == 0)
    {
        steps_.push_back({0, std::max(t_end, 1.0), {y, 0, 0, 0, 0}});
        return;
    }
    double k1 = f(y);
    double h = k1 == 0 ? t_end
                       : std::min(t_end, 0.01 * std::abs(y) / std::abs(k1));
    h = std::max(h, 1e-300);
    std::size_t rejected = 0;

    while (t < t_end)
    {
        if (steps_.size() + rejected > opts.max_steps)
        {
            std::ostringstream os;
            os << "solve_u: step budget exhausted at t=" << t << " u=" << y
               << " h=" << h << " (theta=" << theta << ")";
            throw NumericalError(os.str());
        }
        bool const last = t + h >= t_end;
        if (last)
            h = t_end - t;

        double const k2 = f(y + h * a21 * k1);
        double const k3 = f(y + h * (a31 * k1 + a32 * k2));
        double const k4 = f(y + h * (a41 * k1 + a42 * k2 + a43 * k3));
        double const k5
            = f(y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4));
        double const k6 = f(
            y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
        double const y1 = y
                          + h
                                * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5
                                   + a76 * k6);
        double const k7 = f(y1);
        double const err_abs = h
                               * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5
                                  + e6 * k6 + e7 * k7);
        double const sc = opts.atol
                          + opts.rtol * std::max(std::abs(y), std::abs(y1));
        double const err = std::abs(err_abs) / sc;

        if (!std::isfinite(err))
        {
            h *= 0.1;
            ++rejected;
            if (h < 1e-300)
                throw NumericalError("solve_u: non-finite stage at t="
                                     + std::to_string(t));
            continue;
        }

        double fac = std::pow(std::max(err, 1e-30), 0.2) / 0.9;
        if (err <= 1)
        {
            Step s;
            s.t0 = t;
            s.h = h;
            double const ydiff = y1 - y;
            double const bspl = h * k1 - ydiff;
            s.rc = {y,
                    ydiff,
                    bspl,
                    ydiff - h * k7 - bspl,
                    h
                        * (d1 * k1 + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6
                           + d7 * k7)};
            steps_.push_back(s);
            t = last ? t_end : t + h;
            y = std::max(y1, 0.0);
            k1 = y1 >= 0 ? k7 : f(y);
            fac = std::clamp(fac, 0.1, 5.0);
            h /= fac;
        }
        else
        {
            ++rejected;
            h /= std::min(fac, 5.0);
            if (h <= 4 * std::numeric_limits<double>::epsilon()
                             * std::max(t, 1e-300))
            {
                std::ostringstream os;
                os << "solve_u: step size underflow at t=" << t << " u=" << y
                   << " h=" << h << " err=" << err << " (theta=" << theta
                   << ")";
                throw NumericalError(os.str());
            }
        }
    }
}

USolution::Step const& USolution::locate(double t) const
{
    auto it = std::upper_bound(
        steps_.begin(), steps_.end(), t,
        [](double v, Step const& s) { return v < s.t0; });
    if (it != steps_.begin())
        --it;
    return *it;
}

double USolution::eval(Step const& s, double t) const
{
    double const th = (t - s.t0) / s.h;
    double const th1 = 1 - th;
    auto const& r = s.rc;
    double const v = r[0] + th * (r[1] + th1 * (r[2] + th * (r[3] + th1 * r[4])));
    return std::max(v, 0.0);
}

double USolution::operator()(double t) const
{
    if (!(t >= 0 && t <= t_end_ * (1 + 1e-14)))
        throw DomainError("USolution: time outside the solved interval");
    if (t == 0)
        return theta_;
    return eval(locate(t), t);
}

double USolution::phi_integral(BranchingMechanism const& mech, double t) const
{
    if (!(t >= 0 && t <= t_end_ * (1 + 1e-14)))
        throw DomainError("USolution: time outside the solved interval");
    if (t == 0 || theta_ == 0)
        return 0;
    using Gauss = boost::math::quadrature::gauss<double, 10>;
    double total = 0;
    for (auto const& s : steps_)
    {
        if (s.t0 >= t)
            break;
        double const hi = std::min(s.t0 + s.h, t);
        total += Gauss::integrate(
            [&](double tau) { return phi_eval(mech, eval(s, tau)); },
            s.t0, hi);
    }
    return total;
}

//---------------------------------------------------------------------------//

UCurve solve_u(BranchingMechanism const& mech,
               double theta,
               std::vector<double> const& t_grid)
{
    for (std::size_t i = 0; i < t_grid.size(); ++i)
    {
        if (!(t_grid[i] >= 0) || (i > 0 && !(t_grid[i] > t_grid[i - 1])))
            throw DomainError(
                "solve_u: time grid must be nonnegative and strictly "
                "increasing");
    }
    USolution::Options opts;
    UCurve out;
    out.theta = theta;
    out.times = t_grid;
    out.tolerance = opts.rtol;
    double const t_end = t_grid.empty() ? 0.0 : t_grid.back();
    USolution sol(mech, theta, t_end, opts);
    out.values.reserve(t_grid.size());
    for (double t : t_grid)
        out.values.push_back(sol(t));
    return out;
}

//---------------------------------------------------------------------------//

double closed_form_u(ClosedFormFamily const& f, double theta, double t)
{
    if (!(theta >= 0) || !(t >= 0))
        throw DomainError("closed_form_u: theta and t must be nonnegative");
    switch (f.kind)
    {
        case ClosedFormFamily::Kind::quadratic:
            return theta / (1 + theta * t);
        case ClosedFormFamily::Kind::stable:
            if (!(f.alpha > 1 && f.alpha <= 2))
                throw DomainError("closed_form_u: alpha must lie in (1, 2]");
            if (theta == 0)
                return 0;
            return std::pow(std::pow(theta, 1 - f.alpha) + (f.alpha - 1) * t,
                            1 / (1 - f.alpha));
        case ClosedFormFamily::Kind::linear_quadratic:
        {
            if (!(f.b > 0) || !(f.c >= 0))
                throw DomainError("closed_form_u: need b > 0 and c >= 0");
            double const em = -std::expm1(-f.b * t);
            return f.b * theta * std::exp(-f.b * t) / (f.b + f.c * theta * em);
        }
    }
    throw DomainError("closed_form_u: unsupported family");
}

double closed_form_u_infinity(ClosedFormFamily const& f, double t)
{
    if (!(t > 0))
        throw DomainError("closed_form_u_infinity: t must be positive");
    switch (f.kind)
    {
        case ClosedFormFamily::Kind::quadratic:
            return 1 / t;
        case ClosedFormFamily::Kind::stable:
            return std::pow((f.alpha - 1) * t, 1 / (1 - f.alpha));
        case ClosedFormFamily::Kind::linear_quadratic:
            if (!(f.c > 0))
                throw DomainError("closed_form_u_infinity: u_t(inf) = inf");
            return f.b / (f.c * std::expm1(f.b * t));
    }
    throw DomainError("closed_form_u_infinity: unsupported family");
}

//---------------------------------------------------------------------------//

double csbp_laplace(BranchingMechanism const& mech,
                    double x,
                    double theta,
                    double t)
{
    if (!(x > 0) || !(theta >= 0) || !(t >= 0))
        throw DomainError("csbp_laplace: need x > 0, theta >= 0, t >= 0");
    if (theta == 0)
        return 1;
    USolution sol(mech, theta, t);
    return std::exp(-x * sol(t));
}

double qprocess_laplace(BranchingMechanism const& mech,
                        double x,
                        double theta,
                        double t)
{
    if (!(x > 0) || !(theta >= 0) || !(t >= 0))
        throw DomainError("qprocess_laplace: need x > 0, theta >= 0, t >= 0");
    if (theta == 0)
        return 1;
    USolution sol(mech, theta, t);
    return std::exp(-x * sol(t) - sol.phi_integral(mech, t));
}

UInfinity u_infinity(BranchingMechanism const& mech, double t)
{
    if (!(t > 0))
        throw DomainError("u_infinity: t must be positive");
    UInfinity out;
    std::vector<double> aitken;
    double theta = 1e2;
    for (int k = 0; k < 15; ++k, theta *= 10)
    {
        double const u = USolution(mech, theta, t)(t);
        out.thetas.push_back(theta);
        out.values.push_back(u);
        std::size_t const n = out.values.size();
        if (n >= 2)
        {
            double const prev = out.values[n - 2];
            if (std::abs(u - prev) < 1e-6 * u)
            {
                out.value = u;
                out.method = "direct";
                return out;
            }
        }
        if (n >= 3)
        {
            double const x0 = out.values[n - 3];
            double const x1 = out.values[n - 2];
            double const x2 = u;
            double const den = x2 - 2 * x1 + x0;
            double const acc = den == 0 ? x2
                                        : x2 - (x2 - x1) * (x2 - x1) / den;
            aitken.push_back(acc);
            std::size_t const m = aitken.size();
            if (m >= 2 && std::abs(acc - aitken[m - 2]) <= 1e-6 * std::abs(acc))
            {
                out.value = acc;
                out.method = "aitken";
                return out;
            }
        }
    }
    std::ostringstream os;
    os << "u_infinity: theta ladder did not settle by theta=" << theta / 10
       << " (t=" << t << ", last u=" << out.values.back() << ")";
    throw NumericalError(os.str());
}

double survival_probability(BranchingMechanism const& mech, double x, double t)
{
    if (!(x >= 0) || !(t >= 0))
        throw DomainError("survival_probability: need x >= 0 and t >= 0");
    if (x == 0)
        return 0;
    if (t == 0)
        return 1;
    return -std::expm1(-x * u_infinity(mech, t).value);
}

double survival_conditioned_laplace(BranchingMechanism const& mech,
                                    double x,
                                    double theta,
                                    double t,
                                    double s)
{
    if (!(s > 0))
        throw DomainError("survival_conditioned_laplace: s must be positive");
    double const us = u_infinity(mech, s).value;
    double const surv = survival_probability(mech, x, t + s);
    double const num = std::exp(-x * USolution(mech, theta, t)(t))
                       - std::exp(-x * USolution(mech, theta + us, t)(t));
    return num / surv;
}

}  // namespace csbp
