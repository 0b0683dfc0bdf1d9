#include "csbp/lamperti.hpp"

#include <algorithm>
#include <cmath>

#include "csbp/error.hpp"

namespace csbp
{
namespace
{
void push_knot(SimPath& out, double t, double v, double left)
{
    out.times.push_back(t);
    out.values.push_back(v);
    out.left_values.push_back(left);
    out.brownian_increments.push_back(0);
    out.small_jump_increments.push_back(0);
}

void record(TimeChange* clock, double s, double t, double c)
{
    if (!clock)
        return;
    clock->source_times.push_back(s);
    clock->target_times.push_back(t);
    clock->clock_integral.push_back(c);
}

// Copy the atoms sitting at source time s to target time t
void carry_atoms(SimPath const& in,
                 std::size_t& a,
                 double s,
                 double t,
                 SimPath& out)
{
    while (a < in.atoms.size() && in.atoms[a].t < s)
        ++a;
    while (a < in.atoms.size() && in.atoms[a].t == s)
    {
        JumpAtom atom = in.atoms[a++];
        atom.t = t;
        out.atoms.push_back(atom);
    }
}

LevyMeasure::Stable const& require_stable(BranchingMechanism const& mech)
{
    auto const* st = mech.levy().as_stable();
    if (!st)
        throw DomainError("stable reduction needs a stable Levy measure");
    return *st;
}
}  // namespace

//---------------------------------------------------------------------------//

SimPath levy_to_csbp(SimPath const& xpath, double t_max, TimeChange* clock)
{
    if (xpath.times.empty())
        throw DomainError("levy_to_csbp: empty path");
    if (clock)
        *clock = TimeChange{};
    SimPath out;
    out.kind = PathKind::time_changed;
    out.config = xpath.config;
    double const x = xpath.values.front();
    out.x0 = x;

    if (!(x > 0))
    {
        push_knot(out, 0, 0, 0);
        record(clock, 0, 0, 0);
        out.absorption_time = 0;
        out.end_time = std::isfinite(t_max) ? t_max : 0;
        if (clock)
            clock->absorbed_at = 0;
        return out;
    }

    double const floor = x * 1e-9;
    double c = 0;
    std::size_t a = 0;
    push_knot(out, 0, x, x);
    record(clock, 0, 0, 0);
    carry_atoms(xpath, a, 0, 0, out);

    for (std::size_t i = 1; i < xpath.size(); ++i)
    {
        double const h = xpath.times[i] - xpath.times[i - 1];
        double const prev = xpath.values[i - 1];
        double const left = xpath.left_values[i];
        if (!(left > floor))
        {
            // 1/X is not integrable up to the hitting time on this grid;
            // the left point is the last usable value
            c += h / prev;
            push_knot(out, c, 0, 0);
            record(clock, xpath.times[i], c, c);
            out.absorption_time = c;
            out.end_time = std::isfinite(t_max) ? std::max(t_max, c) : c;
            if (clock)
                clock->absorbed_at = c;
            return out;
        }
        c += 0.5 * h * (1 / prev + 1 / left);
        push_knot(out, c, xpath.values[i], left);
        record(clock, xpath.times[i], c, c);
        carry_atoms(xpath, a, xpath.times[i], c, out);
        if (c > t_max)
        {
            out.end_time = t_max;
            return out;
        }
    }
    out.end_time = c;
    return out;
}

SimPath csbp_to_levy(SimPath const& zpath, TimeChange* clock)
{
    if (zpath.times.empty())
        throw DomainError("csbp_to_levy: empty path");
    if (clock)
        *clock = TimeChange{};
    SimPath out;
    out.kind = PathKind::levy;
    out.config = zpath.config;
    out.x0 = zpath.values.front();

    double d = 0;
    std::size_t a = 0;
    push_knot(out, 0, zpath.values.front(), zpath.left_values.front());
    record(clock, 0, 0, 0);
    carry_atoms(zpath, a, 0, 0, out);
    for (std::size_t i = 1; i < zpath.size(); ++i)
    {
        double const h = zpath.times[i] - zpath.times[i - 1];
        double const prev = std::max(zpath.values[i - 1], 0.0);
        double const left = std::max(zpath.left_values[i], 0.0);
        d += 0.5 * h * (prev + left);
        push_knot(out, d, zpath.values[i], zpath.left_values[i]);
        record(clock, zpath.times[i], d, d);
        carry_atoms(zpath, a, zpath.times[i], d, out);
        if (!(zpath.values[i] > 0))
        {
            out.absorption_time = d;
            if (clock)
                clock->absorbed_at = d;
            break;
        }
    }
    out.end_time = d;
    return out;
}

RoundTripReport lamperti_round_trip(SimPath const& xpath)
{
    SimPath const z = levy_to_csbp(xpath);
    SimPath const back = csbp_to_levy(z);
    RoundTripReport rep;
    std::size_t const n = std::min(back.size(), xpath.size());
    rep.knots = n;
    for (std::size_t i = 0; i < n; ++i)
    {
        rep.sup_time_error = std::max(
            rep.sup_time_error, std::abs(back.times[i] - xpath.times[i]));
        // the absorption knot carries 0 in place of the overshoot value
        if (!(back.absorption_time <= back.times[i]))
            rep.sup_value_error
                = std::max(rep.sup_value_error,
                           std::abs(back.values[i] - xpath.values[i]));
    }
    return rep;
}

//---------------------------------------------------------------------------//

std::vector<ThetaAtom> stable_theta_atoms(SimPath const& qpath,
                                          BranchingMechanism const& mech)
{
    double const inv_alpha = 1 / require_stable(mech).alpha;
    std::vector<ThetaAtom> out;
    for (auto const& a : qpath.atoms)
    {
        if (a.source != AtomSource::branching || !a.applied
            || !(a.z_before > 0))
            continue;
        out.push_back({a.t, a.r / std::pow(a.z_before, inv_alpha)});
    }
    return out;
}

StableDecomposition stable_decompose(SimPath const& qpath,
                                     BranchingMechanism const& mech)
{
    auto const& st = require_stable(mech);
    double const a_expected = -st.k / (st.alpha - 1);
    if (mech.sigma() != 0
        || std::abs(mech.a() - a_expected) > 1e-12 * std::abs(a_expected))
        throw DomainError(
            "stable_decompose: needs sigma = 0 and a = -k / (alpha - 1)");
    auto const& levy = mech.levy();
    auto const& cfg = qpath.config;
    double const inv_alpha = 1 / st.alpha;
    bool const gaussian = cfg.small_jumps == SmallJumps::gaussian;
    double const imm_drift
        = qpath.kind == PathKind::qprocess ? levy.moment(2, 0, cfg.eps) : 0.0;

    StableDecomposition out;
    out.times.push_back(qpath.times.front());
    out.dx.push_back(0);
    out.ds.push_back(0);
    out.residual.push_back(0);

    double const x = qpath.values.front();
    double integral = 0;  // int Z^{1/alpha} dX
    double s_cum = 0;
    std::size_t a = 0;
    for (std::size_t i = 1; i < qpath.size(); ++i)
    {
        double const t = qpath.times[i];
        double const h = t - qpath.times[i - 1];
        double const bound = std::max(qpath.values[i - 1], 0.0);
        double const rel = bound / cfg.scale_reference;
        double const c = cfg.truncation == Truncation::stable_scaled
                             ? cfg.eps * std::pow(std::max(rel, 1.0),
                                                  inv_alpha)
                             : cfg.eps;
        double const scale = std::pow(bound, inv_alpha);

        double dx = mech.a() * h;
        if (scale > 0)
        {
            // theta-space cutoff l = c / Z^{1/alpha}
            dx -= h * levy.moment(1, c / scale, 1);
            if (gaussian)
                dx += std::sqrt(bound * levy.moment(2, 0, c))
                      * qpath.small_jump_increments[i] / scale;
        }
        integral += scale * dx;

        double ds = imm_drift * h;
        bool x_jump = false;
        bool s_jump = false;
        while (a < qpath.atoms.size() && qpath.atoms[a].t < t)
            ++a;
        for (; a < qpath.atoms.size() && qpath.atoms[a].t == t; ++a)
        {
            auto const& atom = qpath.atoms[a];
            if (!atom.applied)
                continue;
            if (atom.source == AtomSource::immigration)
            {
                ds += atom.r;
                out.s_jump_total += atom.r;
                ++out.s_jumps;
                s_jump = true;
            }
            else if (atom.source == AtomSource::branching)
            {
                double const zs = std::pow(atom.z_before, inv_alpha);
                double const theta = atom.r / zs;
                dx += theta;
                integral += zs * theta;
                ++out.x_jumps;
                x_jump = true;
            }
        }
        out.simultaneous_jumps = out.simultaneous_jumps || (x_jump && s_jump);
        s_cum += ds;
        double const res = qpath.values[i] - x - integral - s_cum;
        out.times.push_back(t);
        out.dx.push_back(dx);
        out.ds.push_back(ds);
        out.residual.push_back(res);
        out.max_abs_residual = std::max(out.max_abs_residual, std::abs(res));
    }
    out.s_total = s_cum;
    return out;
}

}  // namespace csbp
