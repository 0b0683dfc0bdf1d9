#include "csbp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "csbp/conditioning.hpp"
#include "csbp/ensemble.hpp"
#include "csbp/error.hpp"
#include "csbp/lamperti.hpp"
#include "csbp/laplace.hpp"
#include "csbp/simulate.hpp"

namespace csbp
{
namespace
{
constexpr char const* kVersion = "0.1.0";

// Distinct ensembles of one suite draw from disjoint path-index ranges.
constexpr std::uint64_t kBlock = std::uint64_t{1} << 24;

CheckReport tagged(CheckReport r, int criterion)
{
    r.extra["criterion"] = criterion;
    return r;
}

// Deterministic bound: pass iff value <= limit.
CheckReport bound_check(std::string name,
                        double value,
                        double limit,
                        std::size_t n,
                        int criterion)
{
    CheckReport r;
    r.name = std::move(name);
    r.estimate = value;
    r.target = 0;
    r.band = limit;
    r.pass = value <= limit;
    r.n = n;
    return tagged(std::move(r), criterion);
}

double rel_err(double got, double want)
{
    return std::abs(got - want) / std::abs(want);
}

BranchingMechanism feller() { return {-1, std::numbers::sqrt2}; }
BranchingMechanism quadratic() { return {0, std::numbers::sqrt2}; }
// Critical stable benchmark: k = 1, alpha = 3/2, a = -2
BranchingMechanism stable_benchmark() { return pure_stable_mechanism(1, 1.5); }

SimConfig base_sim(RunConfig const& cfg, std::uint64_t block)
{
    SimConfig sim = cfg.sim;
    sim.seed = cfg.seed;
    sim.path_index = block * kBlock;
    sim.horizon = 1;
    sim.truncation = Truncation::absolute;
    sim.small_jumps = SmallJumps::drop;
    sim.record_thinned = false;
    return sim;
}

template<class F>
auto ensemble(RunConfig const& cfg,
              SimConfig const& sim,
              std::size_t n,
              F&& f)
{
    return run_ensemble(n, cfg.threads, [&](std::size_t i) {
        SimConfig c = sim;
        c.path_index = sim.path_index + i;
        return f(c);
    });
}

EstimateWithCI mean_of(std::vector<double> const& y,
                       std::vector<double> const* w,
                       double multiplier)
{
    WeightedAccumulator acc;
    for (std::size_t i = 0; i < y.size(); ++i)
        acc.add(y[i], w ? (*w)[i] : 1.0);
    return acc.estimate(multiplier);
}

double agreement_band(EstimateWithCI const& a, EstimateWithCI const& b, double m)
{
    return m * std::hypot(a.std_error, b.std_error);
}

CheckReport agreement(std::string name,
                      EstimateWithCI const& a,
                      EstimateWithCI const& b,
                      double m,
                      std::uint64_t seed,
                      int criterion)
{
    CheckReport r;
    r.name = std::move(name);
    r.estimate = a.mean - b.mean;
    r.std_error = std::hypot(a.std_error, b.std_error);
    r.target = 0;
    r.band = agreement_band(a, b, m);
    r.pass = std::abs(r.estimate) <= r.band;
    r.n = std::min(a.n, b.n);
    r.seed = seed;
    r.extra["first"] = a.mean;
    r.extra["second"] = b.mean;
    return tagged(std::move(r), criterion);
}

//---------------------------------------------------------------------------//
// Laplace

void suite_laplace(RunConfig const& cfg, SuiteReport& out)
{
    struct Family
    {
        std::string name;
        BranchingMechanism mech;
        ClosedFormFamily cf;
    };
    std::vector<Family> const families = {
        {"quadratic", quadratic(), ClosedFormFamily::quadratic()},
        {"stable_1.5", normalized_stable_mechanism(1.5),
         ClosedFormFamily::stable(1.5)},
        {"feller", feller(), ClosedFormFamily::linear_quadratic(1, 1)},
    };
    std::vector<double> const thetas = {0.1, 1, 10};
    std::vector<double> grid;
    for (int i = 0; i <= 100; ++i)
        grid.push_back(0.1 * i);

    for (auto const& fam : families)
    {
        double worst = 0;
        for (double th : thetas)
        {
            auto const curve = solve_u(fam.mech, th, grid);
            for (std::size_t i = 0; i < grid.size(); ++i)
                worst = std::max(worst,
                                 rel_err(curve.values[i],
                                         closed_form_u(fam.cf, th, grid[i])));
        }
        out.checks.push_back(bound_check("ode_vs_closed_form." + fam.name,
                                         worst, 1e-8,
                                         grid.size() * thetas.size(), 1));
    }

    // Q-process transform for psi = l^2: u = theta / (1 + theta t) and the
    // phi-integral equals 2 log(1 + theta t).
    {
        double worst = 0;
        for (double th : thetas)
            for (double t : {0.5, 1.0, 4.0})
            {
                double const want
                    = std::exp(-th / (1 + th * t)) / std::pow(1 + th * t, 2);
                worst = std::max(
                    worst, rel_err(qprocess_laplace(quadratic(), 1, th, t), want));
            }
        out.checks.push_back(
            bound_check("qprocess_laplace_vs_closed_form.quadratic", worst,
                        1e-8, 9, 1));
    }

    std::vector<double> const ts = {0.1, 0.5, 1, 2, 5};
    std::vector<Family> semi = families;
    semi.push_back({"expjumps",
                    BranchingMechanism(-1, 0, LevyMeasure::exponential_jumps(1, 1)),
                    ClosedFormFamily::quadratic()});
    for (auto const& fam : semi)
    {
        double worst = 0;
        std::size_t n = 0;
        for (double th : thetas)
        {
            USolution const outer(fam.mech, th, 10);
            for (double s : ts)
            {
                USolution const inner(fam.mech, outer(s), 5);
                for (double t : ts)
                {
                    worst = std::max(worst, rel_err(inner(t), outer(t + s)));
                    ++n;
                }
            }
        }
        out.checks.push_back(
            bound_check("semigroup." + fam.name, worst, 1e-8, n, 2));
    }
    (void)cfg;
}

//---------------------------------------------------------------------------//
// Martingale

void suite_martingale(RunConfig const& cfg, SuiteReport& out)
{
    auto const mech = feller();
    SimConfig const sim = base_sim(cfg, 1);
    struct Row
    {
        double z_half, z_one;
    };
    auto const rows = ensemble(cfg, sim, cfg.verify.paths, [&](SimConfig const& c) {
        SimPath const p = simulate_csbp(mech, 1, c);
        return Row{p.value_at(0.5), p.value_at(1)};
    });
    std::vector<double> lap;
    std::vector<std::vector<double>> values;
    for (auto const& r : rows)
    {
        lap.push_back(std::exp(-r.z_one));
        values.push_back({r.z_half, r.z_one});
    }
    auto rep = compare("csbp_laplace.feller", mean_of(lap, nullptr, cfg.multiplier),
                       csbp_laplace(mech, 1, 1, 1), cfg.seed);
    out.checks.push_back(tagged(std::move(rep), 3));
    auto checks = martingale_check(values, mech.rho(), 1, {0.5, 1},
                                   cfg.multiplier, cfg.seed);
    checks[0].name = "martingale.feller t=0.5";
    checks[1].name = "martingale.feller t=1";
    for (auto& c : checks)
        out.checks.push_back(tagged(std::move(c), 4));
}

//---------------------------------------------------------------------------//
// Q-process

void suite_qprocess(RunConfig const& cfg, SuiteReport& out)
{
    double const m = cfg.multiplier;
    std::size_t const n = cfg.verify.paths;
    auto const quad = quadratic();
    double const oracle = qprocess_laplace(quad, 1, 1, 1);

    // (a) direct Q-process simulation
    struct QRow
    {
        double y;
        bool zero_hit;
    };
    auto const qrows = ensemble(cfg, base_sim(cfg, 2), n, [&](SimConfig const& c) {
        SimPath const p = simulate_qprocess(quad, 1, c);
        return QRow{std::exp(-p.value_at(1)), p.zero_hit_time <= 1};
    });
    std::vector<double> y;
    std::size_t zero_hits = 0;
    for (auto const& r : qrows)
    {
        y.push_back(r.y);
        zero_hits += r.zero_hit;
    }
    auto const direct = mean_of(y, nullptr, m);
    auto rep = compare("qprocess_laplace.quadratic", direct, oracle, cfg.seed);
    rep.extra["zero_hits"] = zero_hits;
    out.checks.push_back(tagged(rep, 5));

    {
        auto const fel = feller();
        auto const rows = ensemble(cfg, base_sim(cfg, 3), n, [&](SimConfig const& c) {
            SimPath const p = simulate_qprocess(fel, 1, c);
            return QRow{p.value_at(1), p.zero_hit_time <= 1};
        });
        std::vector<double> z;
        std::size_t hits = 0;
        for (auto const& r : rows)
        {
            z.push_back(r.y);
            hits += r.zero_hit;
        }
        auto mean = compare("qprocess_mean.feller", mean_of(z, nullptr, m),
                            2 - std::exp(-1.0), cfg.seed);
        mean.extra["zero_hits"] = hits;
        out.checks.push_back(tagged(std::move(mean), 5));
    }

    // (b) h-transform weighting of CSBP paths
    struct WRow
    {
        double y, w;
    };
    auto const wrows = ensemble(cfg, base_sim(cfg, 4), n, [&](SimConfig const& c) {
        SimPath const p = simulate_csbp(quad, 1, c);
        double const w = hweight(p, quad, 1);
        return WRow{std::exp(-p.value_at(1)), w};
    });
    std::vector<double> wy, ww;
    for (auto const& r : wrows)
    {
        wy.push_back(r.y);
        ww.push_back(r.w);
    }
    auto const weighted = mean_of(wy, &ww, m);
    out.checks.push_back(
        tagged(compare("importance_weighted.quadratic", weighted, oracle, cfg.seed),
               6));

    // (c) conditioning on survival to 1 + s
    SimConfig lsim = base_sim(cfg, 5);
    auto const ladder = survival_conditioned_ladder(
        quad, 1, 1, cfg.verify.s_ladder,
        [](SimPath const& p) { return std::exp(-p.value_at(1)); },
        cfg.verify.survival_paths, lsim, cfg.threads, m);
    bool toward = true;
    nlohmann::json table = nlohmann::json::array();
    for (std::size_t k = 0; k < ladder.size(); ++k)
    {
        auto const& e = ladder[k];
        double const exact = survival_conditioned_laplace(quad, 1, 1, 1, e.s);
        auto c = compare("survival_conditioned.s=" + std::to_string(static_cast<int>(e.s)),
                         e.estimate, exact, cfg.seed);
        c.extra["s"] = e.s;
        c.extra["accepted"] = e.n_accepted;
        c.extra["acceptance_rate"] = e.acceptance_rate;
        c.extra["acceptance_oracle"] = e.acceptance_oracle;
        out.checks.push_back(tagged(std::move(c), 6));
        table.push_back({{"s", e.s},
                         {"estimate", e.estimate.mean},
                         {"stderr", e.estimate.std_error},
                         {"finite_s_exact", exact}});
        if (k > 0)
        {
            auto const& prev = ladder[k - 1];
            double const dir
                = exact - survival_conditioned_laplace(quad, 1, 1, 1, prev.s);
            double const step = e.estimate.mean - prev.estimate.mean;
            double const slack = agreement_band(e.estimate, prev.estimate, m);
            toward = toward && std::copysign(1.0, dir) * step >= -slack;
        }
    }
    auto const& first = ladder.front().estimate;
    auto const& last = ladder.back().estimate;
    {
        CheckReport r;
        r.name = "survival_ladder_monotone";
        r.estimate = std::abs(last.mean - oracle);
        r.target = 0;
        r.band = std::abs(first.mean - oracle);
        r.pass = toward && r.estimate < r.band;
        r.n = cfg.verify.survival_paths;
        r.seed = cfg.seed;
        r.extra["ladder"] = table;
        r.extra["limit"] = oracle;
        out.checks.push_back(tagged(std::move(r), 6));
    }
    out.checks.push_back(agreement("agree.direct_vs_weighted", direct, weighted, m,
                                   cfg.seed, 6));
    out.checks.push_back(agreement("agree.direct_vs_survival", direct, last, m,
                                   cfg.seed, 6));
    out.checks.push_back(agreement("agree.weighted_vs_survival", weighted, last,
                                   m, cfg.seed, 6));

    // B-up under the h-transform: standard normal at t = 1
    {
        auto const fel = feller();
        struct BRow
        {
            double b, w;
        };
        auto const rows = ensemble(cfg, base_sim(cfg, 6), n, [&](SimConfig const& c) {
            SimPath const p = simulate_csbp(fel, 1, c);
            double const w = hweight(p, fel, 1);
            if (w == 0)
                return BRow{0, 0};
            return BRow{girsanov_residual(p, fel, 1).total, w};
        });
        std::vector<double> b, b2, w;
        for (auto const& r : rows)
        {
            b.push_back(r.b);
            b2.push_back(r.b * r.b);
            w.push_back(r.w);
        }
        out.checks.push_back(tagged(
            compare("girsanov_mean.feller", mean_of(b, &w, m), 0, cfg.seed), 8));
        out.checks.push_back(tagged(
            compare("girsanov_second_moment.feller", mean_of(b2, &w, m), 1,
                    cfg.seed),
            8));
    }
}

//---------------------------------------------------------------------------//
// Marking

void suite_marking(RunConfig const& cfg, SuiteReport& out)
{
    double const m = cfg.multiplier;
    auto const mech = stable_benchmark();
    auto const& st = *mech.levy().as_stable();
    double const tail1 = mech.levy().tail_rate(1, JumpWeight::plain);
    SimConfig sim = base_sim(cfg, 7);
    sim.truncation = Truncation::stable_scaled;
    sim.scale_reference = 100;

    std::vector<Box> const boxes = {{0, 0.5, 1, 2},
                                    {0, 0.5, 2, INFINITY},
                                    {0.5, 1 + 1e-12, 1, 2},
                                    {0.5, 1 + 1e-12, 2, INFINITY}};
    std::vector<double> expected;
    for (auto const& b : boxes)
        expected.push_back((std::min(b.t1, 1.0) - b.t0)
                           * mech.levy().moment(1, b.r0, b.r1));

    struct Row
    {
        double w{0};
        double immigrants{0};
        double retained{0};
        double compensator{0};
        std::vector<double> boxes;
        std::size_t atoms{0};
    };
    auto const rows = ensemble(cfg, sim, cfg.verify.paths, [&](SimConfig const& c) {
        SimPath const p = simulate_csbp(mech, 1, c);
        Row r;
        r.boxes.assign(boxes.size(), 0);
        r.w = hweight(p, mech, 1);
        if (r.w == 0)
            return r;
        for (auto const& a : mark_jumps(p))
        {
            if (a.t > 1)
                break;
            ++r.atoms;
            if (a.kind == MarkKind::immigrant && a.delta >= 1)
            {
                r.immigrants += 1;
                for (std::size_t b = 0; b < boxes.size(); ++b)
                    r.boxes[b] += boxes[b].contains(a.t, a.delta);
            }
            if (a.kind == MarkKind::retained && a.applied && a.r >= 1
                && a.nu <= 1)
                r.retained += 1;
        }
        double integral = 0;
        for (std::size_t i = 1; i < p.size() && p.times[i] <= 1; ++i)
            integral += 0.5 * (p.times[i] - p.times[i - 1])
                        * (std::min(p.values[i - 1], 1.0)
                           + std::min(std::max(p.left_values[i], 0.0), 1.0));
        r.compensator = tail1 * integral;
        return r;
    });

    std::vector<double> w, imm, ret, comp;
    std::vector<std::vector<double>> counts;
    double atoms = 0;
    for (auto const& r : rows)
    {
        w.push_back(r.w);
        imm.push_back(r.immigrants);
        ret.push_back(r.retained);
        comp.push_back(r.compensator);
        counts.push_back(r.boxes);
        atoms += static_cast<double>(r.atoms);
    }
    auto ci = compare("immigrant_count.stable", mean_of(imm, &w, m),
                      st.k / (st.alpha - 1), cfg.seed);
    ci.extra["mean_atoms_per_path"] = atoms / static_cast<double>(rows.size());
    out.checks.push_back(tagged(std::move(ci), 7));

    auto cr = campbell_compensated_check(ret, comp, w, m, cfg.seed);
    cr.name = "retained_compensated.stable";
    out.checks.push_back(tagged(std::move(cr), 7));

    auto const box = poisson_box_test_counts(counts, expected, w);
    CheckReport br;
    br.name = "immigrant_box_test.stable";
    double zmax = 0;
    for (double z : box.z)
        zmax = std::max(zmax, std::abs(z));
    br.estimate = zmax;
    br.target = 0;
    br.band = box.z_limit;
    br.pass = box.pass;
    br.n = rows.size();
    br.seed = cfg.seed;
    br.extra["box"] = to_json(box);
    out.checks.push_back(tagged(std::move(br), 7));
}

//---------------------------------------------------------------------------//
// Lamperti

double median(std::vector<double> v)
{
    auto const mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
    std::nth_element(v.begin(), mid, v.end());
    if (v.size() % 2)
        return *mid;
    return 0.5 * (*mid + *std::max_element(v.begin(), mid));
}

void round_trip(RunConfig const& cfg,
                std::string const& name,
                BranchingMechanism const& mech,
                SmallJumps small,
                std::uint64_t block,
                SuiteReport& out)
{
    std::vector<double> cs;
    nlohmann::json detail = nlohmann::json::array();
    for (double scale : {1.0, 0.5})
    {
        SimConfig sim = base_sim(cfg, block);
        sim.dt = cfg.sim.dt * scale;
        sim.horizon = 10;
        sim.small_jumps = small;
        LevyStop const stop{true, 1};
        auto const errs = ensemble(cfg, sim, cfg.verify.roundtrip_paths,
                                   [&](SimConfig const& c) {
                                       SimPath const x = simulate_levy(mech, 1, c, stop);
                                       return lamperti_round_trip(x).sup_time_error
                                              / c.dt;
                                   });
        cs.push_back(median(errs));
        detail.push_back({{"dt", sim.dt}, {"median_sup_error_over_dt", cs.back()}});
    }
    CheckReport r;
    r.name = "round_trip_rate." + name;
    r.estimate = cs[0] / cs[1];
    r.target = 1;
    r.band = 0.5;
    r.pass = r.estimate >= 2.0 / 3 && r.estimate <= 1.5;
    r.n = cfg.verify.roundtrip_paths;
    r.seed = cfg.seed;
    r.extra["runs"] = detail;
    out.checks.push_back(tagged(std::move(r), 9));
}

void time_changed_laplace(RunConfig const& cfg,
                          std::string const& name,
                          BranchingMechanism const& mech,
                          SmallJumps small,
                          std::uint64_t block,
                          SuiteReport& out)
{
    SimConfig sim = base_sim(cfg, block);
    // Levy time needed is int_0^1 Z ds, heavy-tailed for stable input
    sim.horizon = 1e4;
    sim.small_jumps = small;
    LevyStop const stop{true, 1, sim.dt};
    struct Row
    {
        double y;
        bool unresolved;
    };
    auto const rows = ensemble(cfg, sim, cfg.verify.paths, [&](SimConfig const& c) {
        SimPath const x = simulate_levy(mech, 1, c, stop);
        SimPath const z = levy_to_csbp(x, 1);
        bool const resolved = z.absorbed_by(1) || z.times.back() >= 1;
        return Row{std::exp(-z.value_at(1)), !resolved};
    });
    std::vector<double> y;
    std::size_t unresolved = 0;
    for (auto const& r : rows)
    {
        y.push_back(r.y);
        unresolved += r.unresolved;
    }
    auto rep = compare("time_changed_laplace." + name, mean_of(y, nullptr, cfg.multiplier),
                       csbp_laplace(mech, 1, 1, 1), cfg.seed);
    rep.extra["unresolved_paths"] = unresolved;
    rep.pass = rep.pass && unresolved == 0;
    out.checks.push_back(tagged(std::move(rep), 9));
}

void suite_lamperti(RunConfig const& cfg, SuiteReport& out)
{
    round_trip(cfg, "feller", feller(), SmallJumps::drop, 8, out);
    round_trip(cfg, "stable_1.5", normalized_stable_mechanism(1.5),
               SmallJumps::gaussian, 9, out);
    time_changed_laplace(cfg, "feller", feller(), SmallJumps::drop, 10, out);
    time_changed_laplace(cfg, "stable_1.5", normalized_stable_mechanism(1.5),
                         SmallJumps::gaussian, 11, out);
}

//---------------------------------------------------------------------------//
// Stable reduction

void suite_stable(RunConfig const& cfg, SuiteReport& out)
{
    double const m = cfg.multiplier;
    auto const mech = stable_benchmark();
    auto const& st = *mech.levy().as_stable();
    SimConfig sim = base_sim(cfg, 12);
    sim.truncation = Truncation::stable_scaled;
    sim.scale_reference = 1;
    sim.small_jumps = SmallJumps::gaussian;

    struct Row
    {
        double theta_atoms{0};
        double laplace_s{0};
        double residual{0};
        bool simultaneous{false};
        bool zero_hit{false};
    };
    auto const rows = ensemble(cfg, sim, cfg.verify.paths, [&](SimConfig const& c) {
        SimPath const p = simulate_qprocess(mech, 1, c);
        Row r;
        for (auto const& a : stable_theta_atoms(p, mech))
            r.theta_atoms += a.t <= 1 && a.theta >= 1;
        auto const dec = stable_decompose(p, mech);
        r.laplace_s = std::exp(-dec.s_total);
        r.simultaneous = dec.simultaneous_jumps;
        r.zero_hit = p.zero_hit_time <= 1;
        double zmax = 1;
        for (double v : p.values)
            zmax = std::max(zmax, v);
        r.residual = dec.max_abs_residual / zmax;
        return r;
    });

    std::vector<double> counts, ls;
    std::size_t simultaneous = 0, zero_hits = 0;
    double residual = 0;
    for (auto const& r : rows)
    {
        counts.push_back(r.theta_atoms);
        ls.push_back(r.laplace_s);
        simultaneous += r.simultaneous;
        zero_hits += r.zero_hit;
        if (!r.zero_hit)
            residual = std::max(residual, r.residual);
    }
    out.checks.push_back(tagged(compare("theta_atom_rate.stable",
                                        mean_of(counts, nullptr, m),
                                        st.k / st.alpha, cfg.seed),
                                10));
    out.checks.push_back(bound_check("simultaneous_jumps.stable",
                                     static_cast<double>(simultaneous), 0,
                                     rows.size(), 10));
    out.checks.push_back(tagged(compare("immigration_laplace.stable",
                                        mean_of(ls, nullptr, m),
                                        std::exp(-phi_eval(mech, 1)), cfg.seed),
                                10));
    auto res = bound_check("decomposition_residual.stable", residual, 1e-9,
                           rows.size() - zero_hits, 10);
    res.extra["zero_hit_paths"] = zero_hits;
    out.checks.push_back(std::move(res));
}
}  // namespace

//---------------------------------------------------------------------------//

char const* to_string(Suite s)
{
    switch (s)
    {
        case Suite::laplace:
            return "laplace";
        case Suite::martingale:
            return "martingale";
        case Suite::qprocess:
            return "qprocess";
        case Suite::marking:
            return "marking";
        case Suite::lamperti:
            return "lamperti";
        case Suite::stable:
            return "stable";
    }
    return "?";
}

std::vector<Suite> all_suites()
{
    return {Suite::laplace, Suite::martingale, Suite::qprocess,
            Suite::marking, Suite::lamperti,   Suite::stable};
}

Suite suite_from_string(std::string const& name)
{
    for (Suite s : all_suites())
        if (name == to_string(s))
            return s;
    throw ConfigError("suite", "unknown suite '" + name
                                   + "' (laplace|martingale|qprocess|marking|"
                                     "lamperti|stable)");
}

bool SuiteReport::pass() const
{
    return std::all_of(checks.begin(), checks.end(),
                       [](CheckReport const& c) { return c.pass; });
}

nlohmann::json to_json(SuiteReport const& r)
{
    nlohmann::json checks = nlohmann::json::array();
    for (auto const& c : r.checks)
        checks.push_back(to_json(c));
    return {{"suite", to_string(r.suite)},
            {"pass", r.pass()},
            {"checks", checks},
            {"meta", r.meta}};
}

SuiteReport run_verify(Suite suite, RunConfig const& cfg)
{
    SuiteReport out;
    out.suite = suite;
    switch (suite)
    {
        case Suite::laplace:
            suite_laplace(cfg, out);
            break;
        case Suite::martingale:
            suite_martingale(cfg, out);
            break;
        case Suite::qprocess:
            suite_qprocess(cfg, out);
            break;
        case Suite::marking:
            suite_marking(cfg, out);
            break;
        case Suite::lamperti:
            suite_lamperti(cfg, out);
            break;
        case Suite::stable:
            suite_stable(cfg, out);
            break;
    }
    out.meta = {{"version", kVersion},
                {"seed", cfg.seed},
                {"dt", cfg.sim.dt},
                {"eps", cfg.sim.eps},
                {"multiplier", cfg.multiplier},
                {"paths", cfg.verify.paths},
                {"survival_paths", cfg.verify.survival_paths},
                {"roundtrip_paths", cfg.verify.roundtrip_paths}};
    return out;
}

}  // namespace csbp
