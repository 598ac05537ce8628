#include <doctest.h>

#include "heavytail/distributions.hpp"
#include "heavytail/error.hpp"
#include "heavytail/optimize.hpp"
#include "heavytail/rng.hpp"
#include "heavytail/stats.hpp"

#include <cmath>
#include <vector>

using namespace heavytail;

TEST_SUITE("stats")
{
    TEST_CASE("chi-squared and normal tail values")
    {
        CHECK(chi_squared_survival(3.841458820694124, 1) == doctest::Approx(0.05).epsilon(1e-9));
        CHECK(chi_squared_survival(5.991464547107979, 2) == doctest::Approx(0.05).epsilon(1e-9));
        CHECK(chi_squared_survival(0.0, 1) == doctest::Approx(1.0));
        CHECK(two_sided_normal_p(1.959963984540054) == doctest::Approx(0.05).epsilon(1e-9));
        CHECK(two_sided_normal_p(0.0) == doctest::Approx(1.0));
        CHECK(kolmogorov_survival(1.3580986393) == doctest::Approx(0.05).epsilon(1e-4));
    }

    TEST_CASE("likelihood ratio test")
    {
        CHECK(likelihood_ratio_test(-60.0, -60.0, 1).p_value == doctest::Approx(1.0));
        const LrtResult r = likelihood_ratio_test(-60.0, -57.0, 1);
        CHECK(r.statistic == doctest::Approx(6.0));
        CHECK(r.p_value == doctest::Approx(0.0143).epsilon(0.01));
        // Numerical noise that makes the full model slightly worse is clamped.
        CHECK(likelihood_ratio_test(-60.0, -60.0 - 1e-9, 1).p_value == doctest::Approx(1.0));
    }

    TEST_CASE("ks statistic on exact quantiles")
    {
        const int n = 40;
        std::vector<double> s;
        for (int i = 1; i <= n; ++i)
            s.push_back((i - 0.5) / n);
        const KsResult r = ks_test(s, [](double x) { return x; });
        CHECK(r.statistic == doctest::Approx(0.5 / n).epsilon(1e-12));
        CHECK(r.n == static_cast<std::size_t>(n));
        CHECK(r.p_value > 0.99);
    }

    TEST_CASE("ks p-values are uniform under the null")
    {
        Rng rng(2024);
        std::vector<double> pvals;
        for (int rep = 0; rep < 500; ++rep) {
            std::vector<double> s(200);
            for (auto& x : s)
                x = rng.uniform();
            pvals.push_back(ks_test(s, [](double x) { return x; }).p_value);
        }
        const KsResult meta = ks_test(pvals, [](double p) { return std::clamp(p, 0.0, 1.0); });
        CHECK(meta.p_value > 0.01);
    }

    TEST_CASE("ks rejects a shifted sample")
    {
        Rng rng(1);
        std::vector<double> s(500);
        for (auto& x : s)
            x = rng.normal() + 0.5;
        CHECK(ks_test(s, normal_cdf).p_value < 1e-6);
    }

    TEST_CASE("ks preconditions")
    {
        std::vector<double> tiny{0.1, 0.2};
        CHECK_THROWS_AS(ks_test(tiny, [](double x) { return x; }), DomainError);
    }
}

TEST_SUITE("optimize")
{
    TEST_CASE("rosenbrock")
    {
        const Objective f = [](std::span<const double> x) {
            return 100 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1 - x[0], 2);
        };
        const std::vector<double> steps{0.5, 0.5};
        const OptimResult r = minimize(f, {-1.2, 1.0}, steps);
        CHECK(r.converged);
        CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-4));
        CHECK(r.x[1] == doctest::Approx(1.0).epsilon(1e-4));
    }

    TEST_CASE("infeasible region is avoided")
    {
        // Minimum of (x - 2)^2 restricted to x <= 1 lies on the boundary.
        const Objective f = [](std::span<const double> x) {
            return x[0] > 1.0 ? kInf : (x[0] - 2.0) * (x[0] - 2.0);
        };
        const std::vector<double> steps{0.3};
        const OptimResult r = minimize(f, {0.0}, steps);
        CHECK(r.x[0] <= 1.0);
        CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-5));
    }

    TEST_CASE("never worse than the start")
    {
        const Objective f = [](std::span<const double> x) { return std::abs(x[0]) + std::abs(x[1]); };
        const std::vector<double> steps{1.0, 1.0};
        const OptimResult r = minimize(f, {3.0, -2.0}, steps);
        CHECK(r.value <= 5.0);
        CHECK(r.value < 1e-6);
    }
}
