// Command-line front end: mechanism, laplace, simulate, condition, lamperti,
// verify. Exit codes: 0 pass, 1 statistical failure, 2 usage or config
// error, 3 numerical error.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <optional>
#include <sstream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "csbp/conditioning.hpp"
#include "csbp/config.hpp"
#include "csbp/ensemble.hpp"
#include "csbp/error.hpp"
#include "csbp/lamperti.hpp"
#include "csbp/laplace.hpp"
#include "csbp/simulate.hpp"
#include "csbp/verify.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace csbp;

namespace
{
constexpr char const* kVersion = "0.1.0";

constexpr char const* kSchema = R"(Configuration file (JSON, every key optional except "mechanism"):
  {
    "mechanism": {"a": num, "sigma": num >= 0,
                  "levy": {"kind": "zero"}
                        | {"kind": "stable", "k": num > 0, "alpha": 1 < num < 2}
                        | {"kind": "expjumps", "c": num > 0, "b": num > 0}},
    "x": 1, "seed": 0, "paths": 1000, "threads": 1, "multiplier": 3,
    "out_dir": ".",
    "sim": {"horizon": 1, "dt": 1e-3, "eps": 1e-2, "max_jumps": 2000000,
            "truncation": "absolute" | "stable_scaled", "scale_reference": 1,
            "small_jumps": "drop" | "gaussian", "thinning_margin": 2,
            "record_thinned": false},
    "laplace": {"thetas": [1], "times": [0, 0.25, 0.5, 0.75, 1]},
    "condition": {"mode": "weight" | "mark" | "reject", "t": 1, "s": 20,
                  "theta": 1},
    "lamperti": {"direction": "lz" | "zl" | "roundtrip", "t_max": 1},
    "verify": {"paths": 100000, "survival_paths": 400000,
               "s_ladder": [1, 2, 5, 10, 20, 50, 100],
               "roundtrip_paths": 200}
  }
Command-line flags override the file.)";

struct Globals
{
    std::string config_file;
    std::optional<std::string> mech;
    std::optional<std::uint64_t> seed;
    std::optional<unsigned> threads;
    std::optional<std::string> out_dir;
    std::optional<double> x;
    std::optional<double> horizon;
    std::optional<double> dt;
    std::optional<double> eps;
    std::optional<std::size_t> paths;
};

std::string slurp(std::string const& path)
{
    std::ifstream is(path, std::ios::binary);
    if (!is)
        throw ConfigError("--config", "cannot open '" + path + "'");
    std::ostringstream os;
    os << is.rdbuf();
    return os.str();
}

// --mech takes inline JSON or @file
json mech_json(std::string const& arg)
{
    std::string const text = !arg.empty() && arg[0] == '@' ? slurp(arg.substr(1)) : arg;
    try
    {
        return json::parse(text);
    }
    catch (json::parse_error const& e)
    {
        throw ConfigError("--mech", e.what());
    }
}

RunConfig load(Globals const& g)
{
    json j = json::object();
    if (!g.config_file.empty())
    {
        try
        {
            j = json::parse(slurp(g.config_file));
        }
        catch (json::parse_error const& e)
        {
            throw ConfigError(g.config_file, e.what());
        }
    }
    if (g.mech)
        j["mechanism"] = mech_json(*g.mech);
    if (!j.contains("mechanism"))
        throw ConfigError("mechanism", "give --mech or a config with a mechanism");
    RunConfig cfg = config_from_json(j);
    if (g.seed)
        cfg.seed = *g.seed;
    if (g.threads)
        cfg.threads = *g.threads;
    if (g.out_dir)
        cfg.out_dir = *g.out_dir;
    if (g.x)
    {
        if (!(*g.x > 0))
            throw ConfigError("--x", "must be positive");
        cfg.x = *g.x;
    }
    if (g.horizon)
        cfg.sim.horizon = *g.horizon;
    if (g.dt)
        cfg.sim.dt = *g.dt;
    if (g.eps)
        cfg.sim.eps = *g.eps;
    if (g.paths)
    {
        if (*g.paths < 1)
            throw ConfigError("--paths", "must be at least 1");
        cfg.paths = *g.paths;
    }
    cfg.sim.validate();
    cfg.sim.seed = cfg.seed;
    return cfg;
}

json meta(RunConfig const& cfg, std::string const& command)
{
    return {{"command", command},
            {"version", kVersion},
            {"seed", cfg.seed},
            {"config", to_json(cfg)}};
}

fs::path out_path(RunConfig const& cfg, std::string const& name)
{
    fs::path const dir(cfg.out_dir);
    fs::create_directories(dir);
    return dir / name;
}

void write_json(RunConfig const& cfg, std::string const& name, json const& j)
{
    std::ofstream os(out_path(cfg, name));
    os << std::setw(2) << j << '\n';
    if (!os)
        throw ResourceError("cannot write " + out_path(cfg, name).string());
    std::cout << std::setw(2) << j << '\n';
}

std::ofstream open_out(fs::path const& p, std::ios::openmode mode = std::ios::out)
{
    std::ofstream os(p, mode);
    if (!os)
        throw ResourceError("cannot open " + p.string() + " for writing");
    os << std::setprecision(17);
    return os;
}

//---------------------------------------------------------------------------//

int cmd_mechanism(RunConfig const& cfg)
{
    auto const& mech = cfg.mechanism;
    auto const reg = check_regularity(mech);
    json j = meta(cfg, "mechanism");
    j["mechanism"] = to_json(mech);
    j["levy"] = mech.levy().describe();
    j["rho"] = mech.rho();
    j["criticality"] = to_string(classify(mech));
    j["conservative"] = reg.conservative;
    if (reg.almost_sure_extinction)
        j["almost_sure_extinction"] = *reg.almost_sure_extinction;
    j["extinction_integral"] = reg.extinction_integral;
    write_json(cfg, "mechanism.json", j);
    return 0;
}

int cmd_laplace(RunConfig const& cfg)
{
    auto const& mech = cfg.mechanism;
    bool const super = classify(mech) == Criticality::supercritical;
    auto os = open_out(out_path(cfg, "laplace.csv"));
    os << "t,theta,u,csbp_laplace,qprocess_laplace\n";
    for (double th : cfg.laplace.thetas)
    {
        auto const curve = solve_u(mech, th, cfg.laplace.times);
        for (std::size_t i = 0; i < curve.times.size(); ++i)
        {
            double const t = curve.times[i];
            double const u = curve.values[i];
            os << t << ',' << th << ',' << u << ',' << std::exp(-cfg.x * u) << ',';
            if (super)
                os << "nan";
            else
                os << qprocess_laplace(mech, cfg.x, th, t);
            os << '\n';
        }
    }
    json j = meta(cfg, "laplace");
    j["csv"] = out_path(cfg, "laplace.csv").string();
    j["qprocess_defined"] = !super;
    write_json(cfg, "laplace.json", j);
    return 0;
}

int cmd_simulate(RunConfig const& cfg, bool qprocess, std::string const& out)
{
    auto const& mech = cfg.mechanism;
    std::string const base = out.empty() ? "paths" : out;
    auto const paths = run_ensemble(cfg.paths, cfg.threads, [&](std::size_t i) {
        SimConfig c = cfg.sim;
        c.path_index = i;
        return qprocess ? simulate_qprocess(mech, cfg.x, c)
                        : simulate_csbp(mech, cfg.x, c);
    });
    auto bin = open_out(out_path(cfg, base + ".bin"), std::ios::binary);
    std::size_t absorbed = 0;
    WeightedAccumulator acc;
    for (auto const& p : paths)
    {
        write_path_binary(bin, p);
        absorbed += p.absorbed_by(cfg.sim.horizon);
        acc.add(p.value_at(cfg.sim.horizon));
    }
    auto csv = open_out(out_path(cfg, base + ".csv"));
    write_path_csv(csv, paths.front());

    json j = meta(cfg, "simulate");
    j["process"] = qprocess ? "qprocess" : "csbp";
    j["paths"] = paths.size();
    j["binary"] = out_path(cfg, base + ".bin").string();
    j["csv_first_path"] = out_path(cfg, base + ".csv").string();
    j["absorbed_by_horizon"] = absorbed;
    if (paths.size() >= 2)
    {
        auto const e = acc.estimate(cfg.multiplier);
        j["mean_terminal"] = {{"estimate", e.mean}, {"stderr", e.std_error}};
    }
    write_json(cfg, base + ".json", j);
    return 0;
}

int cmd_condition(RunConfig const& cfg)
{
    auto const& mech = cfg.mechanism;
    auto const& opt = cfg.condition;
    double const th = opt.theta;
    auto f = [th, t = opt.t](SimPath const& p) { return std::exp(-th * p.value_at(t)); };
    SimConfig sim = cfg.sim;
    sim.horizon = opt.t;
    json j = meta(cfg, "condition");
    j["mode"] = opt.mode;

    if (opt.mode == "reject")
    {
        auto const e = survival_conditioned_expectation(mech, cfg.x, opt.t, opt.s, f,
                                                        cfg.paths, sim, cfg.threads,
                                                        cfg.multiplier);
        j["estimate"] = e.estimate.mean;
        j["stderr"] = e.estimate.std_error;
        j["n"] = e.n_accepted;
        j["acceptance_rate"] = e.acceptance_rate;
        j["acceptance_oracle"] = e.acceptance_oracle;
        j["finite_s_oracle"] = survival_conditioned_laplace(mech, cfg.x, th, opt.t, opt.s);
        write_json(cfg, "condition.json", j);
        return 0;
    }

    bool const mark = opt.mode == "mark";
    struct Row
    {
        double y{0}, w{0};
        std::vector<MarkedAtom> atoms;
    };
    auto const rows = run_ensemble(cfg.paths, cfg.threads, [&](std::size_t i) {
        SimConfig c = sim;
        c.path_index = i;
        SimPath const p = simulate_csbp(mech, cfg.x, c);
        Row r;
        r.w = hweight(p, mech, opt.t);
        r.y = f(p);
        if (mark)
            r.atoms = mark_jumps(p);
        return r;
    });
    WeightedAccumulator acc;
    for (auto const& r : rows)
        acc.add(r.y, r.w);
    auto const e = acc.estimate(cfg.multiplier);
    j["estimate"] = e.mean;
    j["stderr"] = e.std_error;
    j["n"] = e.n;
    j["effective_n"] = e.effective_n;
    if (classify(mech) != Criticality::supercritical)
        j["oracle"] = qprocess_laplace(mech, cfg.x, th, opt.t);
    if (mark)
    {
        auto os = open_out(out_path(cfg, "marked_atoms.csv"));
        os << "path,t,kind,r,nu,delta\n";
        std::size_t counts[3] = {0, 0, 0};
        for (std::size_t p = 0; p < rows.size(); ++p)
            for (auto const& a : rows[p].atoms)
            {
                os << p << ',' << a.t << ',' << to_string(a.kind) << ',' << a.r << ','
                   << a.nu << ',' << a.delta << '\n';
                ++counts[static_cast<int>(a.kind)];
            }
        j["marked_atoms_csv"] = out_path(cfg, "marked_atoms.csv").string();
        j["retained"] = counts[0];
        j["immigrant"] = counts[1];
        j["null"] = counts[2];
    }
    write_json(cfg, "condition.json", j);
    return 0;
}

int cmd_lamperti(RunConfig const& cfg)
{
    auto const& mech = cfg.mechanism;
    auto const& opt = cfg.lamperti;
    json j = meta(cfg, "lamperti");
    j["direction"] = opt.direction;
    auto csv = open_out(out_path(cfg, "lamperti.csv"));
    csv << "path,source_t,target_t,value\n";

    LevyStop const stop{true, opt.t_max, cfg.sim.dt};
    json per_path = json::array();
    double sup_time = 0, sup_value = 0;
    for (std::size_t i = 0; i < cfg.paths; ++i)
    {
        SimConfig c = cfg.sim;
        c.path_index = i;
        if (opt.direction == "zl")
        {
            c.horizon = opt.t_max;
            SimPath const z = simulate_csbp(mech, cfg.x, c);
            TimeChange clock;
            SimPath const x = csbp_to_levy(z, &clock);
            for (std::size_t k = 0; k < x.size(); ++k)
                csv << i << ',' << clock.source_times[k] << ',' << clock.target_times[k]
                    << ',' << x.values[k] << '\n';
            per_path.push_back({{"levy_end", x.end_time},
                                {"levy_absorbed_at", std::isfinite(clock.absorbed_at)
                                                         ? json(clock.absorbed_at)
                                                         : json(nullptr)}});
            continue;
        }
        SimPath const x = simulate_levy(mech, cfg.x, c, stop);
        TimeChange clock;
        SimPath const z = levy_to_csbp(x, opt.t_max, &clock);
        for (std::size_t k = 0; k < z.size(); ++k)
            csv << i << ',' << clock.source_times[k] << ',' << clock.target_times[k]
                << ',' << z.values[k] << '\n';
        if (opt.direction == "roundtrip")
        {
            auto const rt = lamperti_round_trip(x);
            sup_time = std::max(sup_time, rt.sup_time_error);
            sup_value = std::max(sup_value, rt.sup_value_error);
            per_path.push_back({{"sup_time_error", rt.sup_time_error},
                                {"sup_value_error", rt.sup_value_error},
                                {"knots", rt.knots}});
        }
        else
        {
            per_path.push_back({{"csbp_end", z.end_time},
                                {"csbp_absorbed_at", std::isfinite(clock.absorbed_at)
                                                         ? json(clock.absorbed_at)
                                                         : json(nullptr)}});
        }
    }
    j["paths"] = per_path;
    if (opt.direction == "roundtrip")
    {
        j["sup_time_error"] = sup_time;
        j["sup_value_error"] = sup_value;
        j["sup_time_error_over_dt"] = sup_time / cfg.sim.dt;
    }
    j["csv"] = out_path(cfg, "lamperti.csv").string();
    write_json(cfg, "lamperti.json", j);
    return 0;
}

int cmd_verify(RunConfig const& cfg, std::vector<std::string> const& names)
{
    std::vector<Suite> suites;
    for (auto const& n : names)
    {
        if (n == "all")
        {
            auto const all = all_suites();
            suites.insert(suites.end(), all.begin(), all.end());
        }
        else
        {
            suites.push_back(suite_from_string(n));
        }
    }
    if (suites.empty())
        suites = all_suites();
    bool ok = true;
    json bundle = meta(cfg, "verify");
    bundle["suites"] = json::array();
    for (Suite s : suites)
    {
        auto const rep = run_verify(s, cfg);
        ok = ok && rep.pass();
        json j = to_json(rep);
        j["run"] = meta(cfg, "verify");
        std::ofstream os(out_path(cfg, std::string("verify_") + to_string(s) + ".json"));
        os << std::setw(2) << j << '\n';
        for (auto const& c : rep.checks)
            std::cerr << (c.pass ? "PASS " : "FAIL ") << to_string(s) << ' ' << c.name
                      << " estimate=" << c.estimate << " target=" << c.target
                      << " band=" << c.band << '\n';
        bundle["suites"].push_back({{"suite", to_string(s)}, {"pass", rep.pass()}});
    }
    bundle["pass"] = ok;
    write_json(cfg, "verify.json", bundle);
    return ok ? 0 : 1;
}
}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Simulation and verification of continuous-state branching "
                 "processes and their Q-processes"};
    app.footer(kSchema);
    app.require_subcommand(1);
    Globals g;
    app.add_option("--config", g.config_file, "JSON configuration file")
        ->check(CLI::ExistingFile);
    app.add_option("--seed", g.seed, "Master seed");
    app.add_option("--threads", g.threads, "Worker threads (0 = all cores)");
    app.add_option("--out-dir", g.out_dir, "Directory for reports and data");
    app.add_option("--mech", g.mech, "Mechanism JSON, inline or @file");

    auto* mech = app.add_subcommand("mechanism", "Validate and describe a mechanism");
    auto* lap = app.add_subcommand("laplace", "Laplace-transform curves as CSV");

    auto* sim = app.add_subcommand("simulate", "Simulate CSBP or Q-process paths");
    bool qprocess = false;
    std::string out;
    sim->add_option("--x", g.x, "Initial value");
    sim->add_option("--T", g.horizon, "Horizon");
    sim->add_option("--dt", g.dt, "Euler step");
    sim->add_option("--eps", g.eps, "Jump truncation level");
    sim->add_option("--paths", g.paths, "Number of paths");
    sim->add_option("--seed", g.seed, "Master seed");
    sim->add_option("--mech", g.mech, "Mechanism JSON, inline or @file");
    sim->add_flag("--qprocess", qprocess, "Simulate the Q-process");
    sim->add_option("--out", out, "Output file stem inside --out-dir");

    auto* cond = app.add_subcommand("condition", "Estimate E-up exp(-theta Z_t)");
    std::optional<std::string> mode;
    cond->add_option("--mode", mode, "weight | mark | reject")
        ->check(CLI::IsMember({"weight", "mark", "reject"}));
    cond->add_option("--paths", g.paths, "Number of paths");
    std::optional<double> cond_t, cond_s, cond_theta;
    cond->add_option("--t", cond_t, "Observation time");
    cond->add_option("--s", cond_s, "Survival margin for reject mode");
    cond->add_option("--theta", cond_theta, "Laplace argument");

    auto* lam = app.add_subcommand("lamperti", "Lamperti time changes");
    std::optional<std::string> direction;
    lam->add_option("--direction", direction, "lz | zl | roundtrip")
        ->check(CLI::IsMember({"lz", "zl", "roundtrip"}));
    lam->add_option("--paths", g.paths, "Number of paths");

    auto* ver = app.add_subcommand("verify", "Run verification suites");
    std::vector<std::string> suites;
    ver->add_option("suite", suites,
                    "laplace | martingale | qprocess | marking | lamperti | stable | all");

    try
    {
        app.parse(argc, argv);
    }
    catch (CLI::ParseError const& e)
    {
        int const rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }

    try
    {
        if (ver->parsed() && !g.mech && g.config_file.empty())
            g.mech = R"({"a": -1, "sigma": 1.4142135623730951})";
        RunConfig cfg = load(g);
        if (mode)
            cfg.condition.mode = *mode;
        if (cond_t)
            cfg.condition.t = *cond_t;
        if (cond_s)
            cfg.condition.s = *cond_s;
        if (cond_theta)
            cfg.condition.theta = *cond_theta;
        if (!(cfg.condition.t > 0) || !(cfg.condition.s > 0) || !(cfg.condition.theta >= 0))
            throw ConfigError("condition", "t and s must be positive, theta >= 0");
        if (direction)
            cfg.lamperti.direction = *direction;
        if (!g.config_file.empty() || g.out_dir)
        {
            std::ofstream os(out_path(cfg, "config.json"));
            os << std::setw(2) << to_json(cfg) << '\n';
        }
        if (mech->parsed())
            return cmd_mechanism(cfg);
        if (lap->parsed())
            return cmd_laplace(cfg);
        if (sim->parsed())
            return cmd_simulate(cfg, qprocess, out);
        if (cond->parsed())
            return cmd_condition(cfg);
        if (lam->parsed())
            return cmd_lamperti(cfg);
        return cmd_verify(cfg, suites);
    }
    catch (ConfigError const& e)
    {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    }
    catch (DomainError const& e)
    {
        std::cerr << "invalid input: " << e.what() << '\n';
        return 2;
    }
    catch (StatisticalError const& e)
    {
        std::cerr << "statistical failure: " << e.what() << '\n';
        return 1;
    }
    catch (NumericalError const& e)
    {
        std::cerr << "numerical error: " << e.what() << '\n';
        return 3;
    }
    catch (ResourceError const& e)
    {
        std::cerr << "resource limit: " << e.what() << '\n';
        return 3;
    }
    catch (std::exception const& e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return 3;
    }
}
