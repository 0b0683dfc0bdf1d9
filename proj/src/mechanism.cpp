#include "csbp/mechanism.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/math/special_functions/lambert_w.hpp>
#include <nlohmann/json.hpp>

#include "csbp/error.hpp"

namespace csbp
{
namespace
{
constexpr double kInf = std::numeric_limits<double>::infinity();

template<class... Ts>
struct overloaded : Ts...
{
    using Ts::operator()...;
};
template<class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

// e^{-x} - 1 + x without cancellation for small x
double em1px(double x)
{
    if (x < 1e-3)
    {
        double const x2 = x * x;
        return x2
               * (0.5
                  + x * (-1.0 / 6 + x * (1.0 / 24 + x * (-1.0 / 120
                                                          + x / 720))));
    }
    return std::expm1(-x) + x;
}

// Stable moment of r^p over [lo, hi) with lo <= hi
double stable_moment(double k, double alpha, int p, double lo, double hi)
{
    double const e = p - alpha;
    double hi_term, lo_term;
    if (std::isinf(hi))
    {
        if (e >= 0)
            return kInf;
        hi_term = 0;
    }
    else
    {
        hi_term = std::pow(hi, e);
    }
    if (lo == 0)
    {
        if (e <= 0)
            return kInf;
        lo_term = 0;
    }
    else
    {
        lo_term = std::pow(lo, e);
    }
    return k * (hi_term - lo_term) / e;
}

double exp_moment(double c, double b, int p, double lo, double hi)
{
    using boost::math::gamma_p;
    using boost::math::gamma_q;
    double const s = p + 1;
    double const scale = c * std::tgamma(s) / std::pow(b, s);
    double const xlo = b * lo;
    double const xhi = b * hi;
    if (xlo > s)
    {
        double const qhi = std::isinf(hi) ? 0.0 : gamma_q(s, xhi);
        return scale * (gamma_q(s, xlo) - qhi);
    }
    double const phi = std::isinf(hi) ? 1.0 : gamma_p(s, xhi);
    double const plo = lo == 0 ? 0.0 : gamma_p(s, xlo);
    return scale * (phi - plo);
}

// Integrate f(r) * density over (0, inf) with split points; f is supplied
// separately for r < 1 and r >= 1.
template<class F0, class F1>
double levy_integral(LevyMeasure const& levy, double lambda, F0&& f0, F1&& f1)
{
    boost::math::quadrature::tanh_sinh<double> ts;
    boost::math::quadrature::exp_sinh<double> es;
    double const tol = 1e-13;
    // the product is integrable at 0 even where the density overflows
    auto g0 = [&](double r) {
        double const d = levy.density(r);
        return std::isfinite(d) ? f0(r) * d : 0.0;
    };
    auto g1 = [&](double r) { return f1(r) * levy.density(r); };

    double total = 0;
    double const knee = lambda > 1 ? 1.0 / lambda : 1.0;
    if (knee < 1)
    {
        total += ts.integrate(g0, 0.0, knee, tol);
        total += ts.integrate(g0, knee, 1.0, tol);
    }
    else
    {
        total += ts.integrate(g0, 0.0, 1.0, tol);
    }
    total += es.integrate([&](double s) { return g1(1.0 + s); }, tol);
    return total;
}

}  // namespace

//---------------------------------------------------------------------------//
// LevyMeasure

LevyMeasure LevyMeasure::stable(double k, double alpha)
{
    if (!(k > 0) || !std::isfinite(k))
        throw DomainError("stable intensity k must be positive and finite");
    if (!(alpha > 1 && alpha < 2))
        throw DomainError("stable index alpha must lie in (1, 2)");
    return LevyMeasure(Stable{k, alpha});
}

LevyMeasure LevyMeasure::exponential_jumps(double c, double b)
{
    if (!(c > 0) || !std::isfinite(c))
        throw DomainError("expjumps scale c must be positive and finite");
    if (!(b > 0) || !std::isfinite(b))
        throw DomainError("expjumps decay b must be positive and finite");
    return LevyMeasure(ExponentialJumps{c, b});
}

double LevyMeasure::density(double r) const
{
    if (!(r > 0))
        return 0;
    return std::visit(
        overloaded{
            [](Zero) { return 0.0; },
            [r](Stable s) { return s.k * std::pow(r, -(s.alpha + 1)); },
            [r](ExponentialJumps e) { return e.c * std::exp(-e.b * r); },
        },
        v_);
}

double LevyMeasure::moment(int p, double lo, double hi) const
{
    if (lo < 0 || hi < 0 || std::isnan(lo) || std::isnan(hi))
        throw DomainError("moment bounds must be nonnegative");
    if (lo > hi)
        return -moment(p, hi, lo);
    if (lo == hi)
        return 0;
    return std::visit(
        overloaded{
            [](Zero) { return 0.0; },
            [&](Stable s) { return stable_moment(s.k, s.alpha, p, lo, hi); },
            [&](ExponentialJumps e) { return exp_moment(e.c, e.b, p, lo, hi); },
        },
        v_);
}

double LevyMeasure::tail_rate(double eps, JumpWeight weight) const
{
    if (!(eps > 0))
        throw DomainError("tail cutoff eps must be positive");
    return std::visit(
        overloaded{
            [](Zero) { return 0.0; },
            [&](Stable s) {
                return weight == JumpWeight::plain
                           ? s.k / s.alpha * std::pow(eps, -s.alpha)
                           : s.k / (s.alpha - 1) * std::pow(eps, 1 - s.alpha);
            },
            [&](ExponentialJumps e) {
                double const tail = std::exp(-e.b * eps);
                return weight == JumpWeight::plain
                           ? e.c / e.b * tail
                           : e.c * tail * (e.b * eps + 1) / (e.b * e.b);
            },
        },
        v_);
}

double LevyMeasure::quantile(double eps, JumpWeight weight, double u) const
{
    if (!(eps > 0))
        throw DomainError("tail cutoff eps must be positive");
    if (!(u >= 0 && u < 1))
        throw DomainError("quantile level must lie in [0, 1)");
    return std::visit(
        overloaded{
            [](Zero) -> double {
                throw DomainError("no jumps: Levy measure is zero");
            },
            [&](Stable s) {
                double const expo = weight == JumpWeight::plain
                                        ? -1 / s.alpha
                                        : -1 / (s.alpha - 1);
                return eps * std::pow(1 - u, expo);
            },
            [&](ExponentialJumps e) {
                if (weight == JumpWeight::plain)
                    return eps - std::log1p(-u) / e.b;
                // (1 + x) e^{-x} = q for x = b r >= b eps
                double const be = e.b * eps;
                double const q = (1 - u) * (1 + be) * std::exp(-be);
                double const w = boost::math::lambert_wm1(-q / M_E);
                return std::max(eps, (-1 - w) / e.b);
            },
        },
        v_);
}

double LevyMeasure::psi_jump_part(double lambda) const
{
    return std::visit(
        overloaded{
            [](Zero) { return 0.0; },
            [&](Stable s) {
                double const g = boost::math::tgamma(-s.alpha);
                return s.k * g * std::pow(lambda, s.alpha)
                       - lambda * s.k / (s.alpha - 1);
            },
            [&](ExponentialJumps e) {
                double const b2 = e.b * e.b;
                double const m1 = e.c * std::exp(-e.b) * (e.b + 1) / b2;
                return e.c * lambda * lambda / (b2 * (lambda + e.b))
                       - lambda * m1;
            },
        },
        v_);
}

double LevyMeasure::psi_prime_jump_increment(double lambda) const
{
    return std::visit(
        overloaded{
            [](Zero) { return 0.0; },
            [&](Stable s) {
                double const g = boost::math::tgamma(-s.alpha);
                return s.k * s.alpha * g * std::pow(lambda, s.alpha - 1);
            },
            [&](ExponentialJumps e) {
                double const d = e.b * (lambda + e.b);
                return e.c * lambda * (lambda + 2 * e.b) / (d * d);
            },
        },
        v_);
}

std::string LevyMeasure::describe() const
{
    std::ostringstream os;
    os.precision(17);
    std::visit(overloaded{
                   [&](Zero) { os << "zero"; },
                   [&](Stable s) {
                       os << "stable(k=" << s.k << ", alpha=" << s.alpha
                          << ")";
                   },
                   [&](ExponentialJumps e) {
                       os << "expjumps(c=" << e.c << ", b=" << e.b << ")";
                   },
               },
               v_);
    return os.str();
}

//---------------------------------------------------------------------------//
// BranchingMechanism

char const* to_string(Criticality c)
{
    switch (c)
    {
        case Criticality::subcritical:
            return "subcritical";
        case Criticality::critical:
            return "critical";
        case Criticality::supercritical:
            return "supercritical";
    }
    return "?";
}

BranchingMechanism::BranchingMechanism(double a, double sigma, LevyMeasure levy)
    : a_(a), sigma_(sigma), levy_(levy)
{
    if (!std::isfinite(a))
        throw DomainError("linear coefficient a must be finite");
    if (!(sigma >= 0) || !std::isfinite(sigma))
        throw DomainError("sigma must be nonnegative and finite");
    double const small = levy_.moment(2, 0, 1);
    double const big = levy_.moment(0, 1, kInf);
    if (!std::isfinite(small + big))
        throw DomainError("Levy measure does not integrate 1 ^ r^2");
    double const m1 = levy_.moment(1, 1, kInf);
    if (!std::isfinite(m1))
        throw DomainError("first moment infinite: psi'(0+) is unbounded");
    rho_ = -a_ - m1;
}

BranchingMechanism normalized_stable_mechanism(double alpha)
{
    double const k = 1 / boost::math::tgamma(-alpha);
    return BranchingMechanism(-k / (alpha - 1), 0,
                              LevyMeasure::stable(k, alpha));
}

BranchingMechanism pure_stable_mechanism(double k, double alpha)
{
    return BranchingMechanism(-k / (alpha - 1), 0,
                              LevyMeasure::stable(k, alpha));
}

double psi_eval(BranchingMechanism const& mech, double lambda)
{
    if (!(lambda >= 0))
        throw DomainError("psi: lambda must be nonnegative");
    if (lambda == 0)
        return 0;
    double const s2 = mech.sigma() * mech.sigma();
    return -mech.a() * lambda + 0.5 * s2 * lambda * lambda
           + mech.levy().psi_jump_part(lambda);
}

double psi_prime(BranchingMechanism const& mech, double lambda)
{
    if (!(lambda >= 0))
        throw DomainError("psi': lambda must be nonnegative");
    double const s2 = mech.sigma() * mech.sigma();
    return mech.rho() + s2 * lambda
           + (lambda == 0 ? 0.0
                          : mech.levy().psi_prime_jump_increment(lambda));
}

Criticality classify(BranchingMechanism const& mech)
{
    double const rho = mech.rho();
    if (std::abs(rho) <= 1e-12)
        return Criticality::critical;
    return rho > 0 ? Criticality::subcritical : Criticality::supercritical;
}

double phi_eval(BranchingMechanism const& mech, double theta)
{
    if (classify(mech) == Criticality::supercritical)
        throw DomainError("phi: supercritical mechanisms are unsupported");
    if (!(theta >= 0))
        throw DomainError("phi: theta must be nonnegative");
    if (theta == 0)
        return 0;
    double const s2 = mech.sigma() * mech.sigma();
    return s2 * theta + mech.levy().psi_prime_jump_increment(theta);
}

double psi_quadrature(BranchingMechanism const& mech, double lambda)
{
    if (!(lambda >= 0))
        throw DomainError("psi: lambda must be nonnegative");
    if (lambda == 0)
        return 0;
    double const s2 = mech.sigma() * mech.sigma();
    double jumps = 0;
    if (!mech.levy().is_zero())
    {
        jumps = levy_integral(
            mech.levy(), lambda,
            [lambda](double r) { return em1px(lambda * r); },
            [lambda](double r) { return std::expm1(-lambda * r); });
    }
    return -mech.a() * lambda + 0.5 * s2 * lambda * lambda + jumps;
}

double psi_prime_quadrature(BranchingMechanism const& mech, double lambda)
{
    if (!(lambda >= 0))
        throw DomainError("psi': lambda must be nonnegative");
    double const s2 = mech.sigma() * mech.sigma();
    double jumps = 0;
    if (!mech.levy().is_zero())
    {
        jumps = levy_integral(
            mech.levy(), lambda,
            [lambda](double r) { return -r * std::expm1(-lambda * r); },
            [lambda](double r) { return -r * std::exp(-lambda * r); });
    }
    return -mech.a() + s2 * lambda + jumps;
}

double levy_tail_rate(LevyMeasure const& levy, double eps, JumpWeight weight)
{
    return levy.tail_rate(eps, weight);
}

double sample_levy_jump(LevyMeasure const& levy,
                        double eps,
                        JumpWeight weight,
                        StreamEngine& rng)
{
    if (levy.is_zero())
        throw DomainError("no jumps: Levy measure is zero");
    return levy.quantile(eps, weight, uniform01(rng));
}

//---------------------------------------------------------------------------//

RegularityReport check_regularity(BranchingMechanism const& mech)
{
    RegularityReport rep;
    rep.conservative = psi_eval(mech, 0) == 0 && std::isfinite(mech.rho());
    if (classify(mech) == Criticality::supercritical)
        return rep;

    // psi is convex with psi'(0+) >= 0, so it is positive past any point
    // where it is positive at all.
    double start = 1;
    while (!(psi_eval(mech, start) > 0) && start < 1e12)
        start *= 10;
    rep.lambda_start = start;
    if (!(psi_eval(mech, start) > 0))
    {
        rep.almost_sure_extinction = false;
        rep.extinction_integral = kInf;
        return rep;
    }

    // Sum decade blocks of 1/psi; a ratio of consecutive blocks that stays
    // near 1 means the tail does not decay and the integral diverges.
    using GK = boost::math::quadrature::gauss_kronrod<double, 31>;
    double sum = 0;
    double prev_block = 0;
    double ratio = 0;
    int flat_run = 0;
    double lo = start;
    for (int decade = 0; decade < 60; ++decade)
    {
        double const hi = lo * 10;
        // xi = lo 10^s on s in [0, 1]
        double const block = GK::integrate(
            [&](double s) {
                double const xi = lo * std::pow(10.0, s);
                return xi * M_LN10 / psi_eval(mech, xi);
            },
            0.0, 1.0, 5, 1e-12);
        sum += block;
        if (decade > 0)
        {
            ratio = block / prev_block;
            flat_run = ratio >= 1 - 1e-4 ? flat_run + 1 : 0;
            if (flat_run >= 3)
            {
                rep.almost_sure_extinction = false;
                rep.extinction_integral = kInf;
                return rep;
            }
            if (block <= 1e-13 * sum)
                break;
        }
        prev_block = block;
        lo = hi;
    }
    if (ratio > 0 && ratio < 1)
        sum += prev_block * ratio / (1 - ratio);
    rep.almost_sure_extinction = std::isfinite(sum);
    rep.extinction_integral = sum;
    return rep;
}

//---------------------------------------------------------------------------//
// JSON

nlohmann::json to_json(BranchingMechanism const& mech)
{
    nlohmann::json levy;
    std::visit(overloaded{
                   [&](LevyMeasure::Zero) { levy["kind"] = "zero"; },
                   [&](LevyMeasure::Stable s) {
                       levy = {{"kind", "stable"}, {"k", s.k}, {"alpha", s.alpha}};
                   },
                   [&](LevyMeasure::ExponentialJumps e) {
                       levy = {{"kind", "expjumps"}, {"c", e.c}, {"b", e.b}};
                   },
               },
               mech.levy().variant());
    return {{"a", mech.a()}, {"sigma", mech.sigma()}, {"levy", levy}};
}

namespace
{
void reject_unknown(nlohmann::json const& j,
                    std::string const& prefix,
                    std::initializer_list<char const*> allowed)
{
    for (auto it = j.begin(); it != j.end(); ++it)
    {
        bool ok = false;
        for (char const* name : allowed)
            ok = ok || it.key() == name;
        if (!ok)
            throw ConfigError(prefix + "." + it.key(), "unknown key");
    }
}

double get_number(nlohmann::json const& j,
                  std::string const& prefix,
                  char const* key)
{
    auto it = j.find(key);
    if (it == j.end())
        throw ConfigError(prefix + "." + key, "required number is missing");
    if (!it->is_number())
        throw ConfigError(prefix + "." + key, "expected a number");
    return it->get<double>();
}
}  // namespace

BranchingMechanism mechanism_from_json(nlohmann::json const& j,
                                       std::string const& prefix)
{
    if (!j.is_object())
        throw ConfigError(prefix, "expected an object");
    reject_unknown(j, prefix, {"a", "sigma", "levy"});
    double const a = get_number(j, prefix, "a");
    double const sigma = get_number(j, prefix, "sigma");
    if (!std::isfinite(a))
        throw ConfigError(prefix + ".a", "must be finite");
    if (!(sigma >= 0) || !std::isfinite(sigma))
        throw ConfigError(prefix + ".sigma", "must be a finite value >= 0");

    LevyMeasure levy;
    std::string const lp = prefix + ".levy";
    if (auto it = j.find("levy"); it != j.end())
    {
        if (!it->is_object())
            throw ConfigError(lp, "expected an object");
        auto kind = it->find("kind");
        if (kind == it->end() || !kind->is_string())
            throw ConfigError(lp + ".kind", "expected zero|stable|expjumps");
        std::string const k = kind->get<std::string>();
        if (k == "zero")
        {
            reject_unknown(*it, lp, {"kind"});
        }
        else if (k == "stable")
        {
            reject_unknown(*it, lp, {"kind", "k", "alpha"});
            double const kk = get_number(*it, lp, "k");
            double const alpha = get_number(*it, lp, "alpha");
            if (!(kk > 0) || !std::isfinite(kk))
                throw ConfigError(lp + ".k", "must be positive");
            if (!(alpha > 1 && alpha < 2))
                throw ConfigError(lp + ".alpha",
                                  "stable index must lie in (1, 2); use "
                                  "sigma with a zero measure for alpha = 2");
            levy = LevyMeasure::stable(kk, alpha);
        }
        else if (k == "expjumps")
        {
            reject_unknown(*it, lp, {"kind", "c", "b"});
            double const c = get_number(*it, lp, "c");
            double const b = get_number(*it, lp, "b");
            if (!(c > 0) || !std::isfinite(c))
                throw ConfigError(lp + ".c", "must be positive");
            if (!(b > 0) || !std::isfinite(b))
                throw ConfigError(lp + ".b", "must be positive");
            levy = LevyMeasure::exponential_jumps(c, b);
        }
        else
        {
            throw ConfigError(lp + ".kind",
                              "unknown kind '" + k
                                  + "' (expected zero|stable|expjumps)");
        }
    }
    return BranchingMechanism(a, sigma, levy);
}

}  // namespace csbp
