#include "csbp/conditioning.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csbp/ensemble.hpp"
#include "csbp/error.hpp"
#include "csbp/laplace.hpp"

namespace csbp
{
double hweight(SimPath const& path, BranchingMechanism const& mech, double t)
{
    if (t > path.end_time * (1 + 1e-12))
        throw DomainError("hweight: t beyond the simulated horizon");
    if (path.absorbed_by(t))
        return 0;
    return std::exp(mech.rho() * t) * path.value_at(t) / path.x0;
}

EstimateWithCI importance_expectation(std::span<SimPath const> paths,
                                      BranchingMechanism const& mech,
                                      double t,
                                      PathFunctional const& f,
                                      double multiplier)
{
    if (paths.empty())
        throw DomainError("importance_expectation: empty ensemble");
    WeightedAccumulator acc;
    for (auto const& p : paths)
    {
        double const w = hweight(p, mech, t);
        acc.add(w > 0 ? f(p) : 0.0, w);
    }
    return acc.estimate(multiplier);
}

std::vector<CheckReport> martingale_check(std::span<SimPath const> paths,
                                          BranchingMechanism const& mech,
                                          std::vector<double> const& t_grid,
                                          double multiplier)
{
    if (classify(mech) == Criticality::supercritical)
        throw DomainError("martingale_check: supercritical input refused");
    if (paths.empty())
        throw DomainError("martingale_check: empty ensemble");
    std::vector<std::vector<double>> values;
    values.reserve(paths.size());
    for (auto const& p : paths)
    {
        std::vector<double> row;
        for (double t : t_grid)
            row.push_back(p.value_at(t));
        values.push_back(std::move(row));
    }
    return martingale_check(values, mech.rho(), paths.front().x0, t_grid,
                            multiplier, paths.front().config.seed);
}

//---------------------------------------------------------------------------//

std::vector<double> default_s_ladder(BranchingMechanism const& mech)
{
    std::vector<double> ladder = {1, 2, 5, 10, 20};
    if (classify(mech) == Criticality::subcritical)
        for (double& s : ladder)
            s /= mech.rho();
    return ladder;
}

std::vector<SurvivalEstimate>
survival_conditioned_ladder(BranchingMechanism const& mech,
                            double x,
                            double t,
                            std::vector<double> const& s_ladder,
                            PathFunctional const& f,
                            std::size_t n,
                            SimConfig const& config,
                            unsigned threads,
                            double multiplier)
{
    if (s_ladder.empty())
        throw DomainError("survival ladder is empty");
    for (double s : s_ladder)
        if (!(s > 0))
            throw DomainError("survival ladder: s must be positive");
    if (n < 2)
        throw DomainError("survival ladder: need at least two paths");
    double const s_max = *std::max_element(s_ladder.begin(), s_ladder.end());

    SimConfig cfg = config;
    cfg.horizon = t + s_max;
    struct Record
    {
        double absorbed{SimPath::never};
        double value{0};
    };
    auto records = run_ensemble(n, threads, [&](std::size_t i) {
        SimConfig c = cfg;
        c.path_index = config.path_index + i;
        SimPath const p = simulate_csbp(mech, x, c);
        Record r;
        r.absorbed = p.absorption_time;
        if (!p.absorbed_by(t))
            r.value = f(p);
        return r;
    });

    std::vector<SurvivalEstimate> out;
    for (double s : s_ladder)
    {
        SurvivalEstimate est;
        est.s = s;
        est.n_total = n;
        WeightedAccumulator acc;
        for (auto const& r : records)
        {
            if (r.absorbed > t + s)
                acc.add(r.value);
        }
        est.n_accepted = acc.count();
        if (est.n_accepted == 0)
        {
            std::ostringstream os;
            os << "no path survived to t+s=" << t + s << " out of " << n
               << "; increase N or reduce s";
            throw StatisticalError(os.str());
        }
        double const nd = static_cast<double>(n);
        est.acceptance_rate = static_cast<double>(est.n_accepted) / nd;
        est.acceptance_stderr = std::sqrt(
            est.acceptance_rate * (1 - est.acceptance_rate) / (nd - 1));
        est.acceptance_oracle = survival_probability(mech, x, t + s);
        if (est.n_accepted >= 2)
        {
            est.estimate = acc.estimate(multiplier);
        }
        else
        {
            throw StatisticalError("only one path survived to t+s="
                                   + std::to_string(t + s));
        }
        out.push_back(est);
    }
    return out;
}

SurvivalEstimate
survival_conditioned_expectation(BranchingMechanism const& mech,
                                 double x,
                                 double t,
                                 double s,
                                 PathFunctional const& f,
                                 std::size_t n,
                                 SimConfig const& config,
                                 unsigned threads,
                                 double multiplier)
{
    return survival_conditioned_ladder(mech, x, t, {s}, f, n, config, threads,
                                       multiplier)
        .front();
}

//---------------------------------------------------------------------------//

char const* to_string(MarkKind k)
{
    switch (k)
    {
        case MarkKind::retained:
            return "retained";
        case MarkKind::immigrant:
            return "immigrant";
        case MarkKind::null:
            return "null";
    }
    return "?";
}

std::vector<MarkedAtom> mark_jumps(SimPath const& path)
{
    std::vector<MarkedAtom> out;
    out.reserve(path.atoms.size());
    for (auto const& a : path.atoms)
    {
        if (a.source != AtomSource::branching)
            throw DomainError("mark_jumps: expects CSBP branching atoms");
        if (!(a.u >= 0 && a.u <= 1))
            throw DomainError("mark_jumps: atom at t=" + std::to_string(a.t)
                              + " has no uniform mark");
        MarkedAtom m;
        m.t = a.t;
        m.r = a.r;
        m.nu = a.nu;
        m.applied = a.applied;
        if (!(a.z_after > 0))
        {
            m.kind = MarkKind::null;
        }
        else if (a.u <= a.z_before / a.z_after)
        {
            m.kind = MarkKind::retained;
        }
        else
        {
            m.kind = MarkKind::immigrant;
            m.delta = a.applied ? a.r : 0.0;
        }
        out.push_back(m);
    }
    return out;
}

GirsanovResidual girsanov_residual(SimPath const& path,
                                   BranchingMechanism const& mech,
                                   double t_end)
{
    GirsanovResidual out;
    double const sigma = mech.sigma();
    out.times.push_back(path.times.front());
    out.increments.push_back(0);
    for (std::size_t i = 1; i < path.size() && path.times[i] <= t_end; ++i)
    {
        double const h = path.times[i] - path.times[i - 1];
        double db = path.brownian_increments[i];
        if (sigma != 0)
        {
            double const z0 = path.values[i - 1];
            double const z1 = path.left_values[i];
            if (!(z0 > 0) || !(z1 > 0))
            {
                std::ostringstream os;
                os << "girsanov_residual: Z <= 0 at epoch t="
                   << (z0 > 0 ? path.times[i] : path.times[i - 1]);
                throw DomainError(os.str());
            }
            db -= sigma * 0.5 * h * (1 / std::sqrt(z0) + 1 / std::sqrt(z1));
        }
        out.times.push_back(path.times[i]);
        out.increments.push_back(db);
        out.total += db;
    }
    return out;
}

}  // namespace csbp
