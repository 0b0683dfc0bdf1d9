#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "csbp/error.hpp"
#include "csbp/laplace.hpp"

using namespace csbp;

namespace
{
BranchingMechanism quadratic() { return {0, std::numbers::sqrt2}; }
BranchingMechanism feller() { return {-1, std::numbers::sqrt2}; }

double rel(double a, double b) { return std::abs(a - b) / std::abs(b); }
}  // namespace

TEST(SolveU, MatchesClosedForms)
{
    struct Case
    {
        BranchingMechanism mech;
        ClosedFormFamily cf;
    };
    std::vector<Case> const cases = {
        {quadratic(), ClosedFormFamily::quadratic()},
        {normalized_stable_mechanism(1.5), ClosedFormFamily::stable(1.5)},
        {normalized_stable_mechanism(1.2), ClosedFormFamily::stable(1.2)},
        {feller(), ClosedFormFamily::linear_quadratic(1, 1)},
    };
    std::vector<double> grid;
    for (int i = 0; i <= 50; ++i)
        grid.push_back(0.2 * i);
    for (auto const& c : cases)
        for (double th : {0.1, 1.0, 10.0})
        {
            auto const curve = solve_u(c.mech, th, grid);
            for (std::size_t i = 0; i < grid.size(); ++i)
                ASSERT_LE(rel(curve.values[i], closed_form_u(c.cf, th, grid[i])), 1e-8)
                    << "theta=" << th << " t=" << grid[i];
        }
}

TEST(SolveU, ClosedFormValues)
{
    EXPECT_DOUBLE_EQ(closed_form_u(ClosedFormFamily::quadratic(), 1, 1), 0.5);
    // (theta^{-1/2} + t / 2)^{-2} at theta = t = 1
    EXPECT_NEAR(closed_form_u(ClosedFormFamily::stable(1.5), 1, 1), 4.0 / 9, 1e-15);
    EXPECT_NEAR(closed_form_u_infinity(ClosedFormFamily::linear_quadratic(1, 1), 1),
                1 / (std::exp(1.0) - 1), 1e-15);
}

TEST(SolveU, Semigroup)
{
    for (auto const& m : {feller(), normalized_stable_mechanism(1.5),
                          BranchingMechanism(-1, 0, LevyMeasure::exponential_jumps(1, 1))})
        for (double th : {0.1, 1.0, 10.0})
        {
            USolution const outer(m, th, 10);
            for (double s : {0.1, 1.0, 5.0})
            {
                USolution const inner(m, outer(s), 5);
                for (double t : {0.1, 0.5, 2.0, 5.0})
                    EXPECT_LE(rel(inner(t), outer(t + s)), 1e-8);
            }
        }
}

TEST(SolveU, MonotoneAndBounded)
{
    auto const m = BranchingMechanism(-1, 0.3, LevyMeasure::stable(0.4, 1.6));
    USolution const u(m, 3, 20);
    double prev = 3;
    for (double t = 0.1; t <= 20; t += 0.1)
    {
        double const v = u(t);
        ASSERT_LT(v, prev);
        ASSERT_GT(v, 0);
        prev = v;
    }
    EXPECT_DOUBLE_EQ(u(0), 3);
}

TEST(SolveU, ZeroIsFixed)
{
    EXPECT_EQ(solve_u(feller(), 0, {0, 1, 2}).values, (std::vector<double>{0, 0, 0}));
}

TEST(SolveU, RejectsBadInput)
{
    EXPECT_THROW(solve_u(feller(), -1, {0, 1}), DomainError);
    EXPECT_THROW(solve_u(feller(), 1, {1, 0.5}), DomainError);
    EXPECT_THROW(solve_u(BranchingMechanism(1, 1), 1, {0, 1}), DomainError);
    USolution const u(feller(), 1, 1);
    EXPECT_THROW(u(2), DomainError);
}

// int_0^t phi(u_s) ds = log(psi(theta) / psi(u_t)) - rho t, since
// d/ds log psi(u_s) = -psi'(u_s) = -(phi(u_s) + rho)
TEST(PhiIntegral, MatchesLogIdentity)
{
    for (auto const& m : {feller(), normalized_stable_mechanism(1.5),
                          BranchingMechanism(-1, 0.5, LevyMeasure::exponential_jumps(2, 1.5))})
        for (double th : {0.3, 1.0, 4.0})
        {
            USolution const u(m, th, 3);
            for (double t : {0.5, 1.0, 3.0})
            {
                double const want
                    = std::log(psi_eval(m, th) / psi_eval(m, u(t))) - m.rho() * t;
                EXPECT_NEAR(u.phi_integral(m, t), want, 1e-8 * (1 + want));
            }
        }
}

TEST(QProcessLaplace, QuadraticClosedForm)
{
    EXPECT_NEAR(qprocess_laplace(quadratic(), 1, 1, 1), std::exp(-0.5) / 4, 1e-10);
    for (double x : {0.5, 2.0})
        for (double th : {0.2, 3.0})
            for (double t : {0.3, 2.0})
            {
                double const want = std::exp(-x * th / (1 + th * t)) / std::pow(1 + th * t, 2);
                EXPECT_NEAR(qprocess_laplace(quadratic(), x, th, t), want, 1e-9 * want);
            }
}

TEST(QProcessLaplace, FellerMeanFromDerivative)
{
    // E-up Z_1 = -d/dtheta at 0, which equals 2 - e^{-1} for psi = l + l^2
    double const h = 1e-5;
    double const d = (qprocess_laplace(feller(), 1, h, 1) - qprocess_laplace(feller(), 1, 2 * h, 1)) / h;
    EXPECT_NEAR(d, 2 - std::exp(-1.0), 1e-4);
}

TEST(UInfinity, QuadraticAndFeller)
{
    for (double t : {0.5, 1.0, 3.0})
    {
        EXPECT_NEAR(u_infinity(quadratic(), t).value, 1 / t, 1e-6 / t);
        EXPECT_NEAR(u_infinity(feller(), t).value, 1 / std::expm1(t), 1e-6 / std::expm1(t));
    }
    auto const r = u_infinity(quadratic(), 1);
    EXPECT_FALSE(r.thetas.empty());
    EXPECT_TRUE(r.method == "direct" || r.method == "aitken");
}

TEST(Survival, Probability)
{
    EXPECT_NEAR(survival_probability(quadratic(), 2, 4), 1 - std::exp(-0.5), 1e-7);
    EXPECT_NEAR(survival_probability(feller(), 1, 1), 1 - std::exp(-1 / std::expm1(1.0)), 1e-7);
}

TEST(Survival, ConditionedLaplaceConvergesToQProcess)
{
    auto const q = quadratic();
    double const limit = qprocess_laplace(q, 1, 1, 1);
    double prev_gap = INFINITY;
    for (double s : {1.0, 2.0, 5.0, 10.0, 20.0, 50.0, 100.0})
    {
        // u_t(theta) = theta / (1 + theta t) and u_s(inf) = 1 / s
        auto u = [](double th, double t) { return th / (1 + th * t); };
        double const want = (std::exp(-u(1, 1)) - std::exp(-u(1 + 1 / s, 1)))
                             / (1 - std::exp(-1 / (1 + s)));
        double const got = survival_conditioned_laplace(q, 1, 1, 1, s);
        EXPECT_NEAR(got, want, 1e-6 * want) << "s=" << s;
        double const gap = got - limit;
        EXPECT_GT(gap, 0);
        EXPECT_LT(gap, prev_gap);
        prev_gap = gap;
    }
    EXPECT_NEAR(survival_conditioned_laplace(q, 1, 1, 1, 1), 0.236648, 1e-6);
    EXPECT_NEAR(survival_conditioned_laplace(q, 1, 1, 1, 100), 0.152952, 1e-6);
}
