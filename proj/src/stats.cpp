#include "csbp/stats.hpp"

#include <cmath>
#include <limits>

#include "csbp/error.hpp"

namespace csbp
{
void WeightedAccumulator::add(double value, double weight)
{
    if (!(weight >= 0) || !std::isfinite(weight) || !std::isfinite(value))
        throw DomainError("weighted sample needs a finite value and weight >= 0");
    WeightedAccumulator one;
    one.n_ = 1;
    one.w_ = weight;
    one.mean_ = value;
    one.w2_ = weight * weight;
    merge(one);
}

void WeightedAccumulator::merge(WeightedAccumulator const& o)
{
    if (o.n_ == 0)
        return;
    if (n_ == 0)
    {
        *this = o;
        return;
    }
    double const w = w_ + o.w_;
    double mean = 0;
    if (w > 0)
        mean = mean_ * (w_ / w) + o.mean_ * (o.w_ / w);
    // zero-weight blocks carry no location; re-centre them trivially
    double const d1 = w_ > 0 ? mean - mean_ : 0.0;
    double const d2 = o.w_ > 0 ? mean - o.mean_ : 0.0;
    double const s1 = s_ - 2 * d1 * a_ + d1 * d1 * w2_;
    double const s2 = o.s_ - 2 * d2 * o.a_ + d2 * d2 * o.w2_;
    double const a1 = a_ - d1 * w2_;
    double const a2 = o.a_ - d2 * o.w2_;
    n_ += o.n_;
    w_ = w;
    mean_ = mean;
    w2_ += o.w2_;
    a_ = a1 + a2;
    s_ = std::max(s1 + s2, 0.0);
}

EstimateWithCI WeightedAccumulator::estimate(double multiplier) const
{
    if (n_ < 2)
        throw StatisticalError("weighted estimate needs at least two samples");
    if (!(w_ > 0))
        throw StatisticalError("all weights are zero");
    EstimateWithCI e;
    e.mean = mean_;
    e.n = n_;
    double const nd = static_cast<double>(n_);
    e.std_error = std::sqrt(nd / (nd - 1) * s_) / w_;
    e.multiplier = multiplier;
    e.half_width = multiplier * e.std_error;
    e.effective_n = w_ * w_ / w2_;
    return e;
}

EstimateWithCI weighted_mean_ci(std::span<WeightedSample const> samples,
                                double multiplier)
{
    if (samples.size() < 2)
        throw DomainError("weighted_mean_ci needs at least two samples");
    double w = 0, wy = 0, w2 = 0;
    for (auto const& s : samples)
    {
        if (!(s.weight >= 0) || !std::isfinite(s.weight)
            || !std::isfinite(s.value))
            throw DomainError(
                "weighted sample needs a finite value and weight >= 0");
        w += s.weight;
        wy += s.weight * s.value;
        w2 += s.weight * s.weight;
    }
    if (!(w > 0))
        throw StatisticalError("all weights are zero");
    double const mean = wy / w;
    double ss = 0;
    for (auto const& s : samples)
    {
        double const d = s.weight * (s.value - mean);
        ss += d * d;
    }
    double const n = static_cast<double>(samples.size());
    EstimateWithCI e;
    e.mean = mean;
    e.n = samples.size();
    e.std_error = std::sqrt(n / (n - 1) * ss) / w;
    e.multiplier = multiplier;
    e.half_width = multiplier * e.std_error;
    e.effective_n = w * w / w2;
    return e;
}

//---------------------------------------------------------------------------//

nlohmann::json to_json(CheckReport const& r)
{
    nlohmann::json j = {{"name", r.name},
                        {"estimate", r.estimate},
                        {"stderr", r.std_error},
                        {"target", r.target},
                        {"band", r.band},
                        {"pass", r.pass},
                        {"n", r.n},
                        {"seed", r.seed}};
    if (!r.extra.empty())
        j["extra"] = r.extra;
    return j;
}

CheckReport compare(std::string name,
                    EstimateWithCI const& est,
                    double target,
                    std::uint64_t seed)
{
    CheckReport r;
    r.name = std::move(name);
    r.estimate = est.mean;
    r.std_error = est.std_error;
    r.target = target;
    r.band = est.half_width;
    r.pass = std::abs(est.mean - target) <= est.half_width;
    r.n = est.n;
    r.seed = seed;
    r.extra["effective_n"] = est.effective_n;
    r.extra["multiplier"] = est.multiplier;
    return r;
}

std::vector<CheckReport>
martingale_check(std::vector<std::vector<double>> const& values,
                 double rho,
                 double x,
                 std::vector<double> const& t_grid,
                 double multiplier,
                 std::uint64_t seed)
{
    if (rho < -1e-12)
        throw DomainError("martingale_check: supercritical input refused");
    std::vector<CheckReport> out;
    for (std::size_t j = 0; j < t_grid.size(); ++j)
    {
        double const t = t_grid[j];
        WeightedAccumulator acc;
        for (auto const& row : values)
            acc.add(std::exp(rho * t) * row.at(j));
        auto est = acc.estimate(multiplier);
        auto rep = compare("martingale t=" + std::to_string(t), est, x, seed);
        rep.extra["t"] = t;
        out.push_back(std::move(rep));
    }
    return out;
}

CheckReport campbell_check(std::vector<std::vector<double>> const& sizes,
                           std::span<double const> weights,
                           std::function<double(double)> const& f,
                           double target,
                           double multiplier,
                           std::uint64_t seed)
{
    if (!std::isfinite(target))
        throw DomainError("campbell_check: target must be finite");
    if (!weights.empty() && weights.size() != sizes.size())
        throw DomainError("campbell_check: one weight per path required");
    WeightedAccumulator acc;
    for (std::size_t p = 0; p < sizes.size(); ++p)
    {
        double s = 0;
        for (double r : sizes[p])
            s += f(r);
        acc.add(s, weights.empty() ? 1.0 : weights[p]);
    }
    return compare("campbell", acc.estimate(multiplier), target, seed);
}

CheckReport campbell_compensated_check(std::span<double const> sums,
                                       std::span<double const> compensators,
                                       std::span<double const> weights,
                                       double multiplier,
                                       std::uint64_t seed)
{
    if (sums.size() != compensators.size()
        || (!weights.empty() && weights.size() != sums.size()))
        throw DomainError("campbell_compensated_check: size mismatch");
    WeightedAccumulator acc;
    for (std::size_t p = 0; p < sums.size(); ++p)
    {
        if (!std::isfinite(compensators[p]))
            throw DomainError("campbell_compensated_check: infinite target");
        acc.add(sums[p] - compensators[p],
                weights.empty() ? 1.0 : weights[p]);
    }
    return compare("campbell (compensated)", acc.estimate(multiplier), 0.0,
                   seed);
}

//---------------------------------------------------------------------------//

nlohmann::json to_json(BoxTestReport const& r)
{
    return {{"expected", r.expected},
            {"observed", r.observed},
            {"z", r.z},
            {"corr", r.corr},
            {"z_limit", r.z_limit},
            {"corr_limit", r.corr_limit},
            {"effective_n", r.effective_n},
            {"pass", r.pass}};
}

BoxTestReport poisson_box_test_counts(
    std::vector<std::vector<double>> const& counts,
    std::vector<double> const& expected,
    std::span<double const> weights)
{
    std::size_t const nb = expected.size();
    std::size_t const np = counts.size();
    if (np < 2)
        throw DomainError("poisson_box_test: need at least two paths");
    if (!weights.empty() && weights.size() != np)
        throw DomainError("poisson_box_test: one weight per path required");
    for (double e : expected)
        if (!std::isfinite(e) || e < 0)
            throw DomainError("poisson_box_test: expected means must be finite");

    BoxTestReport rep;
    rep.expected = expected;
    std::vector<WeightedAccumulator> acc(nb);
    double w = 0, w2 = 0;
    for (std::size_t p = 0; p < np; ++p)
    {
        double const wp = weights.empty() ? 1.0 : weights[p];
        w += wp;
        w2 += wp * wp;
        for (std::size_t b = 0; b < nb; ++b)
            acc[b].add(counts[p].at(b), wp);
    }
    if (!(w > 0))
        throw StatisticalError("poisson_box_test: all weights are zero");
    rep.effective_n = w * w / w2;
    rep.corr_limit = 4 / std::sqrt(rep.effective_n);

    std::vector<double> mean(nb);
    rep.pass = true;
    for (std::size_t b = 0; b < nb; ++b)
    {
        auto const est = acc[b].estimate(1);
        mean[b] = est.mean;
        rep.observed.push_back(est.mean);
        double z;
        if (est.std_error > 0)
            z = (est.mean - expected[b]) / est.std_error;
        else
            z = est.mean == expected[b]
                    ? 0.0
                    : std::numeric_limits<double>::infinity();
        rep.z.push_back(z);
        rep.pass = rep.pass && std::abs(z) <= rep.z_limit;
    }

    std::vector<double> cov(nb * nb, 0.0);
    for (std::size_t p = 0; p < np; ++p)
    {
        double const wp = weights.empty() ? 1.0 : weights[p];
        for (std::size_t a = 0; a < nb; ++a)
            for (std::size_t b = a; b < nb; ++b)
                cov[a * nb + b] += wp * (counts[p][a] - mean[a])
                                   * (counts[p][b] - mean[b]);
    }
    rep.corr.assign(nb * nb, 0.0);
    for (std::size_t a = 0; a < nb; ++a)
    {
        for (std::size_t b = a; b < nb; ++b)
        {
            double const va = cov[a * nb + a];
            double const vb = cov[b * nb + b];
            double c = 0;
            if (a == b)
                c = 1;
            else if (va > 0 && vb > 0)
                c = cov[a * nb + b] / std::sqrt(va * vb);
            rep.corr[a * nb + b] = rep.corr[b * nb + a] = c;
            if (a != b)
                rep.pass = rep.pass && std::abs(c) <= rep.corr_limit;
        }
    }
    return rep;
}

BoxTestReport
poisson_box_test(std::vector<std::vector<std::pair<double, double>>> const& atoms,
                 std::vector<Box> const& boxes,
                 std::vector<double> const& expected,
                 std::span<double const> weights)
{
    if (boxes.size() != expected.size())
        throw DomainError("poisson_box_test: one expected mean per box");
    std::vector<std::vector<double>> counts(
        atoms.size(), std::vector<double>(boxes.size(), 0.0));
    for (std::size_t p = 0; p < atoms.size(); ++p)
        for (auto const& [t, r] : atoms[p])
            for (std::size_t b = 0; b < boxes.size(); ++b)
                if (boxes[b].contains(t, r))
                    counts[p][b] += 1;
    return poisson_box_test_counts(counts, expected, weights);
}

}  // namespace csbp
