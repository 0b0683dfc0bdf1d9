#include "csbp/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "csbp/error.hpp"
#include "csbp/rng.hpp"

namespace csbp
{
void SimConfig::validate() const
{
    if (!(horizon > 0) || !std::isfinite(horizon))
        throw ConfigError("sim.horizon", "must be positive and finite");
    if (!(dt > 0) || !(dt <= horizon))
        throw ConfigError("sim.dt", "must satisfy 0 < dt <= horizon");
    if (!(eps > 0) || !(eps <= 1))
        throw ConfigError("sim.eps", "must satisfy 0 < eps <= 1");
    if (!(thinning_margin >= 1) || !std::isfinite(thinning_margin))
        throw ConfigError("sim.thinning_margin", "must be finite and >= 1");
    if (!(scale_reference > 0) || !std::isfinite(scale_reference))
        throw ConfigError("sim.scale_reference", "must be positive and finite");
    if (max_jumps == 0)
        throw ConfigError("sim.max_jumps", "must be positive");
    if (path_index > 0xffffffffull)
        throw ConfigError("sim.path_index", "must fit in 32 bits");
}

char const* to_string(Truncation t)
{
    return t == Truncation::absolute ? "absolute" : "stable_scaled";
}

char const* to_string(SmallJumps s)
{
    return s == SmallJumps::drop ? "drop" : "gaussian";
}

char const* to_string(PathKind k)
{
    switch (k)
    {
        case PathKind::csbp:
            return "csbp";
        case PathKind::qprocess:
            return "qprocess";
        case PathKind::levy:
            return "levy";
        case PathKind::time_changed:
            return "time_changed";
    }
    return "?";
}

double SimPath::value_at(double t) const
{
    if (times.empty())
        throw DomainError("value_at: empty path");
    auto it = std::upper_bound(times.begin(), times.end(), t);
    if (it == times.begin())
        return values.front();
    return values[static_cast<std::size_t>(it - times.begin()) - 1];
}

double SimPath::left_limit_at(double t) const
{
    if (times.empty())
        throw DomainError("left_limit_at: empty path");
    auto it = std::lower_bound(times.begin(), times.end(), t);
    std::size_t const i = static_cast<std::size_t>(it - times.begin());
    if (i < times.size() && times[i] == t)
        return left_values[i];
    return i == 0 ? values.front() : values[i - 1];
}

namespace
{
class PathBuilder
{
  public:
    PathBuilder(BranchingMechanism const& mech,
                double x,
                SimConfig const& cfg,
                PathKind kind,
                LevyStop stop)
        : mech_(mech)
        , levy_(mech.levy())
        , cfg_(cfg)
        , kind_(kind)
        , stop_(stop)
        , brownian_(cfg.seed, cfg.path_index, Stream::brownian)
        , small_(cfg.seed, cfg.path_index, Stream::small_jumps)
        , epochs_(cfg.seed, cfg.path_index, Stream::jump_epochs)
        , imm_epochs_(cfg.seed, cfg.path_index, Stream::immigrant_epochs)
        , sizes_(cfg.seed, cfg.path_index, Stream::jump_sizes)
        , imm_sizes_(cfg.seed, cfg.path_index, Stream::immigrant_sizes)
        , selection_(cfg.seed, cfg.path_index, Stream::selection)
        , marks_(cfg.seed, cfg.path_index, Stream::marks)
        , bridge_(cfg.seed, cfg.path_index, Stream::bridge)
    {
        cfg_.validate();
        if (!(x >= 0) || !std::isfinite(x)
            || (kind != PathKind::levy && !(x > 0)))
            throw DomainError("initial value must be positive and finite");
        if (cfg.truncation == Truncation::stable_scaled)
        {
            auto const* st = levy_.as_stable();
            if (!st)
                throw DomainError(
                    "stable_scaled truncation needs a stable Levy measure");
            if (kind == PathKind::levy)
                throw DomainError(
                    "stable_scaled truncation applies to CSBP paths only");
            inv_alpha_ = 1 / st->alpha;
        }
        sigma2_ = mech.sigma() * mech.sigma();
        has_jumps_ = !levy_.is_zero();
        if (has_jumps_)
        {
            fixed_ = cutoff_terms(cfg.eps);
            if (kind == PathKind::qprocess)
            {
                imm_rate_ = levy_.tail_rate(cfg.eps, JumpWeight::size_biased);
                imm_mean_drift_ = levy_.moment(2, 0, cfg.eps);
            }
        }

        path_.kind = kind;
        path_.x0 = x;
        path_.config = cfg;
        std::size_t const n_grid
            = static_cast<std::size_t>(std::ceil(cfg.horizon / cfg.dt)) + 1;
        path_.times.reserve(n_grid);
        path_.values.reserve(n_grid);
        path_.left_values.reserve(n_grid);
        path_.brownian_increments.reserve(n_grid);
        path_.small_jump_increments.reserve(n_grid);
        push_knot(0, x, x, 0, 0);
        z_ = x;
    }

    SimPath run();

  private:
    struct CutoffTerms
    {
        double c{0};
        double tail{0};  // Pi([c, inf))
        double m1{0};  // signed int_c^1 r Pi(dr)
        double var{0};  // int_0^c r^2 Pi(dr)
    };

    CutoffTerms cutoff_terms(double c) const
    {
        CutoffTerms out;
        out.c = c;
        out.tail = levy_.tail_rate(c, JumpWeight::plain);
        out.m1 = levy_.moment(1, c, 1);
        out.var = cfg_.small_jumps == SmallJumps::gaussian
                      ? levy_.moment(2, 0, c)
                      : 0.0;
        return out;
    }

    CutoffTerms const& terms_for(double bound)
    {
        double const rel = bound / cfg_.scale_reference;
        if (cfg_.truncation == Truncation::absolute || rel <= 1)
            return fixed_;
        scaled_ = cutoff_terms(cfg_.eps * std::pow(rel, inv_alpha_));
        return scaled_;
    }

    void push_knot(double t, double v, double left, double db, double dw)
    {
        path_.times.push_back(t);
        path_.values.push_back(v);
        path_.left_values.push_back(left);
        path_.brownian_increments.push_back(db);
        path_.small_jump_increments.push_back(dw);
    }

    void count_jump()
    {
        if (++n_jumps_ > cfg_.max_jumps)
        {
            std::ostringstream os;
            os << "max_jumps (" << cfg_.max_jumps << ") exceeded at t="
               << t_ << " with state " << z_;
            throw ResourceError(os.str());
        }
    }

    BranchingMechanism const& mech_;
    LevyMeasure const& levy_;
    SimConfig cfg_;
    PathKind kind_;
    LevyStop stop_;

    NormalStream brownian_;
    NormalStream small_;
    StreamEngine epochs_;
    StreamEngine imm_epochs_;
    StreamEngine sizes_;
    StreamEngine imm_sizes_;
    StreamEngine selection_;
    StreamEngine marks_;
    StreamEngine bridge_;

    double sigma2_{0};
    bool has_jumps_{false};
    double inv_alpha_{0};
    CutoffTerms fixed_;
    CutoffTerms scaled_;
    double imm_rate_{0};
    double imm_mean_drift_{0};

    SimPath path_;
    double t_{0};
    double z_{0};
    double clock_{0};
    std::size_t n_jumps_{0};

};

SimPath PathBuilder::run()
{
    bool const levy = kind_ == PathKind::levy;
    bool const qproc = kind_ == PathKind::qprocess;
    double const dt = cfg_.dt;
    double const T = cfg_.horizon;
    std::size_t const n_steps = static_cast<std::size_t>(
        std::ceil(T / dt * (1 - 1e-12)));

    // Remaining integrated hazards of the two epoch clocks
    double e_branch = exponential1(epochs_);
    double e_imm = exponential1(imm_epochs_);

    for (std::size_t k = 1; k <= n_steps; ++k)
    {
        double const t_grid = k == n_steps ? T : static_cast<double>(k) * dt;
        while (t_ < t_grid)
        {
            double const bound = std::max(z_, 0.0);
            CutoffTerms const* ct = nullptr;
            double lam_b = 0;
            if (has_jumps_)
            {
                ct = levy ? &fixed_ : &terms_for(bound);
                lam_b = levy ? ct->tail
                             : cfg_.thinning_margin * bound * ct->tail;
            }
            double const lam_i = imm_rate_;

            double h = t_grid - t_;
            bool capped = false;
            if (levy && stop_.clock_step > 0)
            {
                double const cap = stop_.clock_step
                                   * std::max(z_, 1e-9 * std::max(path_.x0, 1.0));
                capped = cap < h;
                h = std::min(h, cap);
            }
            enum
            {
                none,
                branch,
                immigrant
            } ev
                = none;
            if (lam_b > 0 && e_branch < lam_b * h)
            {
                h = e_branch / lam_b;
                ev = branch;
            }
            if (lam_i > 0 && e_imm < lam_i * h)
            {
                h = e_imm / lam_i;
                ev = immigrant;
            }
            e_branch = ev == branch ? exponential1(epochs_)
                                    : e_branch - lam_b * h;
            e_imm = ev == immigrant ? exponential1(imm_epochs_)
                                    : e_imm - lam_i * h;

            // Euler substep over (t, t + h]
            double const sq = std::sqrt(h);
            double const db = sq * brownian_();
            double const var_small = ct ? ct->var : 0.0;
            double const dw = var_small > 0 ? sq * small_() : 0.0;
            double const m1 = ct ? ct->m1 : 0.0;
            double zl;
            if (levy)
            {
                zl = z_ + (mech_.a() - m1) * h + mech_.sigma() * db
                     + std::sqrt(var_small) * dw;
            }
            else
            {
                double drift = bound * (mech_.a() - m1);
                if (qproc)
                    drift += sigma2_ + imm_mean_drift_;
                zl = z_ + drift * h + mech_.sigma() * std::sqrt(bound) * db
                     + std::sqrt(bound * var_small) * dw;
            }
            double const t_prev = t_;
            t_ = ev == none && !capped ? t_grid : t_ + h;
            if ((ev != none || capped) && !(t_ < t_grid))
                t_ = std::nextafter(t_grid, 0.0);
            if (!std::isfinite(zl))
            {
                std::ostringstream os;
                os << "non-finite state at t=" << t_ << " (from " << z_
                   << ")";
                throw NumericalError(os.str());
            }

            // Boundary handling
            if (kind_ == PathKind::csbp && zl <= 0)
            {
                push_knot(t_, 0, 0, db, dw);
                path_.absorption_time = t_;
                path_.end_time = T;
                return std::move(path_);
            }
            if (qproc && zl < 0)
            {
                zl = 0;
                path_.zero_hit_time = std::min(path_.zero_hit_time, t_);
            }
            if (levy && stop_.at_zero)
            {
                bool hit = zl <= 0;
                double const var_rate = sigma2_ + var_small;
                if (!hit && var_rate > 0 && z_ > 0)
                {
                    double const p
                        = std::exp(-2 * z_ * zl / (var_rate * (t_ - t_prev)));
                    hit = uniform01(bridge_) < p;
                    if (hit)
                        zl = 0;
                }
                if (hit)
                {
                    push_knot(t_, zl, zl, db, dw);
                    path_.absorption_time = t_;
                    path_.end_time = t_;
                    return std::move(path_);
                }
            }
            if (levy && std::isfinite(stop_.clock_limit))
            {
                clock_ += 0.5 * (t_ - t_prev) * (1 / z_ + 1 / zl);
                if (clock_ > stop_.clock_limit)
                {
                    push_knot(t_, zl, zl, db, dw);
                    path_.end_time = t_;
                    return std::move(path_);
                }
            }

            double zr = zl;
            if (ev == branch)
            {
                count_jump();
                JumpAtom atom;
                atom.t = t_;
                atom.source = levy ? AtomSource::levy : AtomSource::branching;
                atom.r = levy_.quantile(ct->c, JumpWeight::plain,
                                        uniform01(sizes_));
                atom.u = uniform01(marks_);
                if (!levy)
                {
                    atom.nu = uniform01(selection_) * cfg_.thinning_margin
                              * bound;
                    atom.applied = atom.nu <= zl;
                }
                if (atom.applied)
                    zr = zl + atom.r;
                atom.z_before = zl;
                atom.z_after = zr;
                if (atom.applied || cfg_.record_thinned)
                    path_.atoms.push_back(atom);
            }
            else if (ev == immigrant)
            {
                count_jump();
                JumpAtom atom;
                atom.t = t_;
                atom.source = AtomSource::immigration;
                atom.u = std::numeric_limits<double>::quiet_NaN();
                atom.r = levy_.quantile(cfg_.eps, JumpWeight::size_biased,
                                        uniform01(imm_sizes_));
                zr = zl + atom.r;
                atom.z_before = zl;
                atom.z_after = zr;
                path_.atoms.push_back(atom);
            }
            push_knot(t_, zr, zl, db, dw);
            z_ = zr;
        }
    }
    path_.end_time = T;
    return std::move(path_);
}

}  // namespace

SimPath simulate_csbp(BranchingMechanism const& mech,
                      double x,
                      SimConfig const& config)
{
    // psi(0) = 0 by construction; the mechanism holds a finite rho
    if (!std::isfinite(mech.rho()))
        throw DomainError("simulate_csbp: mechanism is not conservative");
    return PathBuilder(mech, x, config, PathKind::csbp, {}).run();
}

SimPath simulate_qprocess(BranchingMechanism const& mech,
                          double x,
                          SimConfig const& config)
{
    if (classify(mech) == Criticality::supercritical)
        throw DomainError("simulate_qprocess: supercritical mechanism");
    return PathBuilder(mech, x, config, PathKind::qprocess, {}).run();
}

SimPath simulate_levy(BranchingMechanism const& mech,
                      double x0,
                      SimConfig const& config,
                      LevyStop const& stop)
{
    return PathBuilder(mech, x0, config, PathKind::levy, stop).run();
}

}  // namespace csbp
