#include "csbp/config.hpp"

#include <cmath>
#include <initializer_list>

#include "csbp/error.hpp"

namespace csbp
{
namespace
{
using nlohmann::json;

// Walks one JSON object, remembering the dotted prefix for error messages.
class Section
{
  public:
    Section(json const* j, std::string prefix, std::initializer_list<char const*> keys)
        : j_(j), prefix_(std::move(prefix))
    {
        if (!j_)
            return;
        if (!j_->is_object())
            throw ConfigError(prefix_, "expected an object");
        for (auto it = j_->begin(); it != j_->end(); ++it)
        {
            bool known = false;
            for (char const* k : keys)
                known = known || it.key() == k;
            if (!known)
                throw ConfigError(path(it.key()), "unknown key");
        }
    }

    std::string path(std::string const& key) const
    {
        return prefix_.empty() ? key : prefix_ + "." + key;
    }

    json const* find(char const* key) const
    {
        if (!j_)
            return nullptr;
        auto it = j_->find(key);
        return it == j_->end() ? nullptr : &*it;
    }

    void number(char const* key, double& out) const
    {
        if (auto const* v = find(key))
        {
            if (!v->is_number())
                throw ConfigError(path(key), "expected a number");
            out = v->get<double>();
            if (!std::isfinite(out))
                throw ConfigError(path(key), "must be finite");
        }
    }

    template<class T>
    void count(char const* key, T& out) const
    {
        if (auto const* v = find(key))
        {
            if (!v->is_number_integer() || v->get<long long>() < 0)
                throw ConfigError(path(key), "expected a non-negative integer");
            out = static_cast<T>(v->get<unsigned long long>());
        }
    }

    void boolean(char const* key, bool& out) const
    {
        if (auto const* v = find(key))
        {
            if (!v->is_boolean())
                throw ConfigError(path(key), "expected true or false");
            out = v->get<bool>();
        }
    }

    void string(char const* key, std::string& out) const
    {
        if (auto const* v = find(key))
        {
            if (!v->is_string())
                throw ConfigError(path(key), "expected a string");
            out = v->get<std::string>();
        }
    }

    void numbers(char const* key, std::vector<double>& out) const
    {
        if (auto const* v = find(key))
        {
            if (!v->is_array() || v->empty())
                throw ConfigError(path(key), "expected a non-empty array");
            out.clear();
            for (std::size_t i = 0; i < v->size(); ++i)
            {
                auto const& e = (*v)[i];
                if (!e.is_number() || !std::isfinite(e.get<double>()))
                    throw ConfigError(path(key) + "[" + std::to_string(i) + "]",
                                      "expected a finite number");
                out.push_back(e.get<double>());
            }
        }
    }

  private:
    json const* j_;
    std::string prefix_;
};

void choose(std::string const& field,
            std::string const& value,
            std::initializer_list<char const*> allowed)
{
    std::string list;
    for (char const* a : allowed)
    {
        if (value == a)
            return;
        list += list.empty() ? a : std::string("|") + a;
    }
    throw ConfigError(field, "expected " + list + ", got '" + value + "'");
}

void positive(std::string const& field, double v)
{
    if (!(v > 0))
        throw ConfigError(field, "must be positive");
}

SimConfig sim_from_json(json const* j)
{
    SimConfig sim;
    Section s(j, "sim",
              {"horizon", "dt", "eps", "max_jumps", "truncation",
               "scale_reference", "small_jumps", "thinning_margin",
               "record_thinned"});
    s.number("horizon", sim.horizon);
    s.number("dt", sim.dt);
    s.number("eps", sim.eps);
    s.count("max_jumps", sim.max_jumps);
    s.number("scale_reference", sim.scale_reference);
    s.number("thinning_margin", sim.thinning_margin);
    s.boolean("record_thinned", sim.record_thinned);
    std::string trunc = to_string(sim.truncation);
    s.string("truncation", trunc);
    choose("sim.truncation", trunc, {"absolute", "stable_scaled"});
    sim.truncation = trunc == "absolute" ? Truncation::absolute
                                         : Truncation::stable_scaled;
    std::string small = to_string(sim.small_jumps);
    s.string("small_jumps", small);
    choose("sim.small_jumps", small, {"drop", "gaussian"});
    sim.small_jumps = small == "drop" ? SmallJumps::drop : SmallJumps::gaussian;
    sim.validate();
    return sim;
}
}  // namespace

//---------------------------------------------------------------------------//

nlohmann::json to_json(SimConfig const& sim)
{
    return {{"horizon", sim.horizon},
            {"dt", sim.dt},
            {"eps", sim.eps},
            {"max_jumps", sim.max_jumps},
            {"truncation", to_string(sim.truncation)},
            {"scale_reference", sim.scale_reference},
            {"small_jumps", to_string(sim.small_jumps)},
            {"thinning_margin", sim.thinning_margin},
            {"record_thinned", sim.record_thinned}};
}

RunConfig config_from_json(nlohmann::json const& j)
{
    Section root(&j, "",
                 {"mechanism", "x", "sim", "seed", "paths", "threads",
                  "multiplier", "out_dir", "laplace", "condition", "lamperti",
                  "verify"});
    RunConfig cfg;
    auto const* mech = root.find("mechanism");
    if (!mech)
        throw ConfigError("mechanism", "required object is missing");
    cfg.mechanism = mechanism_from_json(*mech, "mechanism");
    root.number("x", cfg.x);
    positive("x", cfg.x);
    cfg.sim = sim_from_json(root.find("sim"));
    root.count("seed", cfg.seed);
    root.count("paths", cfg.paths);
    if (cfg.paths < 1)
        throw ConfigError("paths", "must be at least 1");
    root.count("threads", cfg.threads);
    root.number("multiplier", cfg.multiplier);
    positive("multiplier", cfg.multiplier);
    root.string("out_dir", cfg.out_dir);

    Section lap(root.find("laplace"), "laplace", {"thetas", "times"});
    lap.numbers("thetas", cfg.laplace.thetas);
    lap.numbers("times", cfg.laplace.times);
    for (double th : cfg.laplace.thetas)
        if (th < 0)
            throw ConfigError("laplace.thetas", "entries must be >= 0");

    Section cond(root.find("condition"), "condition", {"mode", "t", "s", "theta"});
    cond.string("mode", cfg.condition.mode);
    choose("condition.mode", cfg.condition.mode, {"weight", "mark", "reject"});
    cond.number("t", cfg.condition.t);
    positive("condition.t", cfg.condition.t);
    cond.number("s", cfg.condition.s);
    positive("condition.s", cfg.condition.s);
    cond.number("theta", cfg.condition.theta);
    if (cfg.condition.theta < 0)
        throw ConfigError("condition.theta", "must be >= 0");

    Section lam(root.find("lamperti"), "lamperti", {"direction", "t_max"});
    lam.string("direction", cfg.lamperti.direction);
    choose("lamperti.direction", cfg.lamperti.direction, {"lz", "zl", "roundtrip"});
    lam.number("t_max", cfg.lamperti.t_max);
    positive("lamperti.t_max", cfg.lamperti.t_max);

    Section ver(root.find("verify"), "verify",
                {"paths", "survival_paths", "s_ladder", "roundtrip_paths"});
    ver.count("paths", cfg.verify.paths);
    ver.count("survival_paths", cfg.verify.survival_paths);
    ver.numbers("s_ladder", cfg.verify.s_ladder);
    ver.count("roundtrip_paths", cfg.verify.roundtrip_paths);
    if (cfg.verify.paths < 2)
        throw ConfigError("verify.paths", "must be at least 2");
    if (cfg.verify.survival_paths < 2)
        throw ConfigError("verify.survival_paths", "must be at least 2");
    if (cfg.verify.roundtrip_paths < 1)
        throw ConfigError("verify.roundtrip_paths", "must be at least 1");
    for (double s : cfg.verify.s_ladder)
        positive("verify.s_ladder", s);
    return cfg;
}

RunConfig parse_config(std::string_view bytes)
{
    nlohmann::json j;
    try
    {
        j = nlohmann::json::parse(bytes);
    }
    catch (nlohmann::json::parse_error const& e)
    {
        throw ConfigError("<document>", e.what());
    }
    return config_from_json(j);
}

nlohmann::json to_json(RunConfig const& cfg)
{
    return {{"mechanism", to_json(cfg.mechanism)},
            {"x", cfg.x},
            {"sim", to_json(cfg.sim)},
            {"seed", cfg.seed},
            {"paths", cfg.paths},
            {"threads", cfg.threads},
            {"multiplier", cfg.multiplier},
            {"out_dir", cfg.out_dir},
            {"laplace",
             {{"thetas", cfg.laplace.thetas}, {"times", cfg.laplace.times}}},
            {"condition",
             {{"mode", cfg.condition.mode},
              {"t", cfg.condition.t},
              {"s", cfg.condition.s},
              {"theta", cfg.condition.theta}}},
            {"lamperti",
             {{"direction", cfg.lamperti.direction},
              {"t_max", cfg.lamperti.t_max}}},
            {"verify",
             {{"paths", cfg.verify.paths},
              {"survival_paths", cfg.verify.survival_paths},
              {"s_ladder", cfg.verify.s_ladder},
              {"roundtrip_paths", cfg.verify.roundtrip_paths}}}};
}

}  // namespace csbp
