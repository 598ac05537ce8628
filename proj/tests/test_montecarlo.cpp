#include <doctest.h>

#include "heavytail/error.hpp"
#include "heavytail/montecarlo.hpp"
#include "heavytail/severity.hpp"
#include "heavytail/stats.hpp"

#include <cmath>
#include <numeric>
#include <vector>

using namespace heavytail;

namespace {

SeverityModel d0()
{
    SeverityModel m;
    m.model = DteModel::D0;
    m.u = std::log(5e4);
    m.alpha0 = 0.47;
    m.nu0 = 18.839;
    return m;
}

SimSpec paper_spec(std::uint64_t seed)
{
    SimSpec s;
    s.rate = 75.5;
    s.horizon = 8.0;
    s.severity = d0();
    s.seed = seed;
    return s;
}

double mean_of(const std::vector<double>& v)
{
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double var_of(const std::vector<double>& v)
{
    const double m = mean_of(v);
    double s = 0.0;
    for (double x : v)
        s += (x - m) * (x - m);
    return s / static_cast<double>(v.size() - 1);
}

} // namespace

TEST_SUITE("montecarlo")
{
    TEST_CASE("zero rate gives an empty catalog")
    {
        SimSpec s = paper_spec(1);
        s.rate = 0.0;
        CHECK(simulate_catalog(s).empty());
        s.rate = RateLine{0.0, 0.0};
        CHECK(simulate_catalog(s).empty());
    }

    TEST_CASE("event counts follow the rate")
    {
        const SimSpec s = paper_spec(2);
        double total = 0.0;
        for (std::size_t r = 0; r < 500; ++r)
            total += static_cast<double>(simulate_catalog(s, r).size());
        CHECK(std::abs(total / 500.0 - 604.0) < 2.0 * std::sqrt(604.0 / 500.0));
    }

    TEST_CASE("thinning follows a rate line")
    {
        // 12 * integral of (4 + 0.5 t) over eight years.
        const RateLine line{4.0, 0.5};
        double total = 0.0;
        double late = 0.0;
        for (std::size_t r = 0; r < 300; ++r) {
            Rng rng(derive_seed(3, r));
            const auto times = simulate_event_times(line, 8.0, rng);
            total += static_cast<double>(times.size());
            for (double t : times)
                late += t >= 4.0;
        }
        CHECK(std::abs(total / 300.0 - 576.0) < 3.0 * std::sqrt(576.0 / 300.0));
        // 12 * integral over [4, 8) is 336.
        CHECK(std::abs(late / 300.0 - 336.0) < 3.0 * std::sqrt(336.0 / 300.0));
        Rng rng(0);
        CHECK_THROWS_AS(simulate_event_times(RateLine{1.0, -1.0}, 8.0, rng), DomainError);
        CHECK_THROWS_AS(simulate_event_times(-1.0, 8.0, rng), DomainError);
        CHECK_THROWS_AS(simulate_event_times(1.0, 0.0, rng), DomainError);
    }

    TEST_CASE("simulated sizes follow the truncated Pareto")
    {
        const SimSpec s = paper_spec(4);
        const DtpParams p = s.severity.sizes_at(0.0);
        int pass = 0;
        for (std::size_t r = 0; r < 500; ++r) {
            const BreachCatalog c = simulate_catalog(s, r);
            std::vector<double> sizes;
            for (const auto& e : c.events())
                sizes.push_back(static_cast<double>(*e.size));
            pass += ks_test(sizes, [&](double x) { return dtp_cdf(x, p); }).p_value > 0.01;
        }
        CHECK(pass >= 490);
    }

    TEST_CASE("catalogs are reproducible from the seed")
    {
        const SimSpec s = paper_spec(5);
        CHECK(simulate_catalog(s, 3) == simulate_catalog(s, 3));
        CHECK_FALSE(simulate_catalog(s, 3) == simulate_catalog(s, 4));
        const BreachCatalog c = simulate_catalog(s);
        CHECK(c.epoch() == default_epoch());
        for (const auto& e : c.events())
            CHECK(*e.size > 50000u);
    }

    TEST_CASE("replication results do not depend on threads")
    {
        const auto work = [](std::size_t i, Rng& rng) { return rng.uniform() + static_cast<double>(i); };
        const auto one = run_replications(200, 77, 1, work);
        const auto four = run_replications(200, 77, 4, work);
        const auto all = run_replications(200, 77, 0, work);
        CHECK(one == four);
        CHECK(one == all);
        CHECK(run_replications(0, 77, 4, work).empty());
    }

    TEST_CASE("a single repetition is degenerate")
    {
        const Replicate rep = [](Rng& rng) -> std::optional<std::vector<double>> {
            return std::vector<double>{rng.normal()};
        };
        const BootstrapResult b = bootstrap_se(1, rep, 1, 9);
        CHECK(b.degenerate);
        CHECK(b.n_ok == 1);
        CHECK(b.se[0] == 0.0);
        const BootstrapResult many = bootstrap_se(1, rep, 2000, 9);
        CHECK_FALSE(many.degenerate);
        CHECK(many.se[0] == doctest::Approx(1.0).epsilon(0.05));
        CHECK(std::abs(many.mean[0]) < 0.1);
    }

    TEST_CASE("too many failed repetitions is an error")
    {
        const auto failing = [](double share) {
            return Replicate([share](Rng& rng) -> std::optional<std::vector<double>> {
                if (rng.uniform() < share)
                    return std::nullopt;
                return std::vector<double>{rng.normal()};
            });
        };
        CHECK_THROWS_AS(bootstrap_se(1, failing(0.3), 200, 1), EstimationError);
        const BootstrapResult some = bootstrap_se(1, failing(0.03), 200, 1);
        CHECK(some.n_failed > 0);
        CHECK(some.n_ok + some.n_failed == 200);
        CHECK(some.estimates.size() == some.n_ok);
        const auto nan_stat = [](Rng& rng) -> std::optional<double> {
            return rng.uniform() < 0.5 ? std::nan("") : 1.0;
        };
        CHECK_THROWS_AS(null_pvalue(nan_stat, 1.0, 100, 1), EstimationError);
    }

    TEST_CASE("standard errors shrink like one over root n")
    {
        SeverityOptions o;
        o.n_boot = 100;
        o.n_null = 0;
        double ratio = 0.0;
        const int trials = 20;
        for (int k = 0; k < trials; ++k) {
            Rng rng(derive_seed(606, k));
            const auto se_at = [&](std::size_t n) {
                std::vector<double> t(n);
                for (std::size_t i = 0; i < n; ++i)
                    t[i] = 8.0 * static_cast<double>(i) / static_cast<double>(n);
                const auto y = simulate_log_sizes(d0(), t, rng);
                o.seed = rng.bits();
                return fit_dte(y, t, 5e4, DteModel::D0, std::nullopt, o).alpha0_se;
            };
            const double small = se_at(300);
            ratio += se_at(600) / small;
        }
        CHECK(std::abs(ratio / trials - std::sqrt(0.5)) < 0.1);
    }

    TEST_CASE("null p-values")
    {
        const auto normal = [](Rng& rng) -> std::optional<double> { return rng.normal(); };
        const NullPValue zero = null_pvalue(normal, 0.0, 300, 1);
        CHECK(zero.p_value == 1.0);
        CHECK(zero.n_extreme == 300);
        const NullPValue far = null_pvalue(normal, 50.0, 300, 1);
        CHECK(far.p_value == doctest::Approx(1.0 / 301.0));
        CHECK(far.p_value > 0.0);
        const NullPValue mid = null_pvalue(normal, 1.959964, 4000, 2);
        CHECK(mid.p_value == doctest::Approx(0.05).epsilon(0.15));
    }

    TEST_CASE("a statistic against its own null gives uniform p-values")
    {
        const auto normal = [](Rng& rng) -> std::optional<double> { return rng.normal(); };
        Rng rng(31);
        std::vector<double> p;
        for (int r = 0; r < 200; ++r)
            p.push_back(null_pvalue(normal, rng.normal(), 199, derive_seed(32, r)).p_value);
        CHECK(ks_test(p, [](double x) { return std::clamp(x, 0.0, 1.0); }).p_value > 0.01);
    }

    TEST_CASE("compound years match the closed-form moments")
    {
        const DtpParams x = d0().sizes_at(0.0);
        const DtpMoments m = dtp_moments(x);
        const double count_mean = 75.5;
        const double count_var = 229.0;
        const auto years = simulate_compound_years(x, count_mean, count_var, 100000, 15);
        const double mean = m.mean * count_mean;
        const double var = count_mean * m.variance() + m.mean * m.mean * count_var;
        CHECK(mean_of(years) == doctest::Approx(mean).epsilon(0.02));
        CHECK(var_of(years) == doctest::Approx(var).epsilon(0.02));

        const auto poisson = simulate_compound_years(x, count_mean, count_mean, 100000, 16);
        CHECK(var_of(poisson) == doctest::Approx(count_mean * m.second_moment).epsilon(0.02));
    }
}
