#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace csbp
{
struct EstimateWithCI
{
    double mean{0};
    double std_error{0};
    std::size_t n{0};
    double half_width{0};
    double multiplier{3};
    //! (sum w)^2 / sum w^2; equals n for unit weights
    double effective_n{0};
};

struct WeightedSample
{
    double value{0};
    double weight{1};
};

/*!
 * Mergeable reduction for the self-normalized weighted mean.
 *
 * Tracks the weighted mean together with sum w^2 (y - mean) and
 * sum w^2 (y - mean)^2, re-centred on every merge, so partial aggregates
 * from different workers combine without cancellation.
 */
class WeightedAccumulator
{
  public:
    void add(double value, double weight = 1);
    void merge(WeightedAccumulator const& other);

    std::size_t count() const { return n_; }
    double weight_sum() const { return w_; }

    //! Throws StatisticalError if every weight is zero or n < 2
    EstimateWithCI estimate(double multiplier = 3) const;

  private:
    std::size_t n_{0};
    double w_{0};
    double mean_{0};
    double w2_{0};
    double a_{0};  // sum w^2 (y - mean)
    double s_{0};  // sum w^2 (y - mean)^2
};

/*!
 * Self-normalized estimate sum w y / sum w with delta-method standard error
 *
 *   se^2 = n / (n - 1) * sum w^2 (y - mean)^2 / (sum w)^2,
 *
 * which is the textbook s / sqrt(n) when all weights are 1.
 */
EstimateWithCI weighted_mean_ci(std::span<WeightedSample const> samples,
                                double multiplier = 3);

//---------------------------------------------------------------------------//
//! Machine-readable outcome of one statistical assertion.
struct CheckReport
{
    std::string name;
    double estimate{0};
    double std_error{0};
    double target{0};
    //! Allowed |estimate - target|
    double band{0};
    bool pass{false};
    std::size_t n{0};
    std::uint64_t seed{0};
    nlohmann::json extra = nlohmann::json::object();
};

nlohmann::json to_json(CheckReport const& r);

//! Compare an estimate to a target with band = multiplier * stderr.
CheckReport compare(std::string name,
                    EstimateWithCI const& est,
                    double target,
                    std::uint64_t seed = 0);

//---------------------------------------------------------------------------//

/*!
 * Martingale check: e^{rho t} Z_t has mean x at every t.
 *
 * values[p][j] is Z_{t_j} on path p.
 */
std::vector<CheckReport>
martingale_check(std::vector<std::vector<double>> const& values,
                 double rho,
                 double x,
                 std::vector<double> const& t_grid,
                 double multiplier = 3,
                 std::uint64_t seed = 0);

/*!
 * Campbell check: the (optionally weighted) mean over paths of
 * sum_n f(r_n) against target = t * int f dm.
 *
 * sizes[p] lists the atom sizes of path p inside the time window; an empty
 * weights span means unit weights.
 */
CheckReport campbell_check(std::vector<std::vector<double>> const& sizes,
                           std::span<double const> weights,
                           std::function<double(double)> const& f,
                           double target,
                           double multiplier = 3,
                           std::uint64_t seed = 0);

/*!
 * Campbell check with a per-path compensator: the mean of
 * sum_n f(atoms) - compensator_p should vanish.
 */
CheckReport campbell_compensated_check(std::span<double const> sums,
                                       std::span<double const> compensators,
                                       std::span<double const> weights,
                                       double multiplier = 3,
                                       std::uint64_t seed = 0);

//! Time x size box [t0, t1) x [r0, r1).
struct Box
{
    double t0, t1, r0, r1;
    bool contains(double t, double r) const
    {
        return t >= t0 && t < t1 && r >= r0 && r < r1;
    }
};

struct BoxTestReport
{
    std::vector<double> expected;
    std::vector<double> observed;  //!< weighted mean counts
    std::vector<double> z;
    //! Row-major correlation matrix of per-path counts
    std::vector<double> corr;
    double z_limit{4};
    double corr_limit{0};
    double effective_n{0};
    bool pass{false};
};

nlohmann::json to_json(BoxTestReport const& r);

/*!
 * Poisson box test: per-box count z-scores against the expected means and
 * pairwise correlations of the counts across paths. Passes if every
 * |z| <= 4 and every |corr| <= 4 / sqrt(n_eff).
 *
 * atoms[p] holds (t, r) pairs for path p.
 */
BoxTestReport
poisson_box_test(std::vector<std::vector<std::pair<double, double>>> const& atoms,
                 std::vector<Box> const& boxes,
                 std::vector<double> const& expected,
                 std::span<double const> weights = {});

//! Same test starting from precomputed counts[p][box].
BoxTestReport poisson_box_test_counts(
    std::vector<std::vector<double>> const& counts,
    std::vector<double> const& expected,
    std::span<double const> weights = {});

}  // namespace csbp
