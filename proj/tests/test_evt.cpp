#include <doctest.h>

#include "heavytail/error.hpp"
#include "heavytail/evt.hpp"
#include "heavytail/rng.hpp"
#include "heavytail/severity.hpp"

#include <cmath>
#include <vector>

using namespace heavytail;

namespace {

struct Sample {
    std::vector<double> y;
    std::vector<double> t;
};

// Levels u + GPD draws with a time-varying scale.
Sample gpd_sample_at(GpdModel model, double u, double xi, double beta0, double beta1, std::size_t n,
                     std::uint64_t seed)
{
    Rng rng(seed);
    Sample s;
    for (std::size_t i = 0; i < n; ++i) {
        const double t = 8.0 * (i + 0.5) / n;
        double b = beta0;
        if (model == GpdModel::M2)
            b += beta1 * t;
        if (model == GpdModel::M3)
            b += beta1 * std::log(t + kLogTimeShift);
        s.t.push_back(t);
        s.y.push_back(u + gpd_sample({xi, b, 0.0}, rng));
    }
    return s;
}

FitOptions quick()
{
    FitOptions o;
    o.n_boot = 0;
    return o;
}

} // namespace

TEST_SUITE("evt")
{
    TEST_CASE("recovers the shape from 5000 draws")
    {
        const Sample s = gpd_sample_at(GpdModel::M1, 0.0, -0.5, 2.0, 0.0, 5000, 1);
        const GpdFit f = fit_pot(s.y, s.t, 0.0, GpdModel::M1, quick());
        CHECK(f.converged);
        CHECK(f.n_exceed == 5000);
        CHECK(f.xi == doctest::Approx(-0.5).epsilon(0.1));
        CHECK(std::abs(f.xi + 0.5) < 0.05);
        CHECK(std::abs(f.beta0 - 2.0) < 0.1);
    }

    TEST_CASE("only points above u are used")
    {
        Sample s = gpd_sample_at(GpdModel::M1, 15.5, -0.6, 2.0, 0.0, 200, 2);
        for (int i = 0; i < 300; ++i) {
            s.y.push_back(15.5 - 0.01 * i);
            s.t.push_back(1.0);
        }
        const GpdFit f = fit_pot(s.y, s.t, 15.5, GpdModel::M1, quick());
        CHECK(f.n_exceed == 200);
    }

    TEST_CASE("M3 recovers a growing scale")
    {
        const Sample s = gpd_sample_at(GpdModel::M3, 15.5, -0.78, 1.6, 0.65, 3000, 3);
        const GpdFit f = fit_pot(s.y, s.t, 15.5, GpdModel::M3, quick());
        CHECK(std::abs(f.xi + 0.78) < 0.06);
        CHECK(std::abs(f.beta0 - 1.6) < 0.15);
        CHECK(std::abs(f.beta1 - 0.65) < 0.1);
    }

    TEST_CASE("M0 has no finite endpoint")
    {
        const Sample s = gpd_sample_at(GpdModel::M1, 0.0, 0.2, 1.0, 0.0, 2000, 4);
        const GpdFit f = fit_pot(s.y, s.t, 0.0, GpdModel::M0, quick());
        CHECK(f.xi >= 0.0);
        CHECK(f.endpoint(1.0) == std::numeric_limits<double>::infinity());
    }

    TEST_CASE("bootstrap errors and slope p-value")
    {
        const Sample s = gpd_sample_at(GpdModel::M3, 15.5, -0.78, 1.6, 0.65, 60, 5);
        FitOptions o;
        o.n_boot = 60;
        o.seed = 9;
        const GpdFit f = fit_pot(s.y, s.t, 15.5, GpdModel::M3, o);
        CHECK(f.boot_ok + f.boot_failed == 60);
        CHECK(f.xi_se > 0.0);
        CHECK(f.beta1_se > 0.0);
        REQUIRE(f.beta1_p);
        CHECK(*f.beta1_p > 0.0);
        CHECK(*f.beta1_p <= 1.0);
        const GpdFit again = fit_pot(s.y, s.t, 15.5, GpdModel::M3, o);
        CHECK(again.xi_se == f.xi_se);
        CHECK(again.beta1_p == f.beta1_p);
    }

    TEST_CASE("too few exceedances")
    {
        const Sample s = gpd_sample_at(GpdModel::M1, 0.0, -0.5, 2.0, 0.0, 9, 6);
        CHECK_THROWS_AS(fit_pot(s.y, s.t, 0.0, GpdModel::M1, quick()), EstimationError);
    }

    TEST_CASE("endpoint curves")
    {
        GpdFit m1;
        m1.model = GpdModel::M1;
        m1.u = 15.5;
        m1.xi = -0.61;
        m1.beta0 = 2.24;
        const std::vector<double> ts{0.5, 2.0, 8.0};
        const EndpointCurve c1 = endpoint_curve(m1, ts);
        for (double e : c1.endpoints)
            CHECK(e == doctest::Approx(15.5 + 2.24 / 0.61));
        CHECK_FALSE(c1.growth_exponent);

        GpdFit m2 = m1;
        m2.model = GpdModel::M2;
        m2.beta1 = 0.0;
        const EndpointCurve c2 = endpoint_curve(m2, ts);
        CHECK(c2.endpoints == c1.endpoints);

        GpdFit m3 = m1;
        m3.model = GpdModel::M3;
        m3.xi = -0.78;
        m3.beta0 = 1.60;
        m3.beta1 = 0.65;
        const EndpointCurve c3 = endpoint_curve(m3, ts);
        REQUIRE(c3.growth_exponent);
        CHECK(*c3.growth_exponent == doctest::Approx(0.65 / 0.78).epsilon(1e-12));
        CHECK(*c3.growth_exponent == doctest::Approx(0.833).epsilon(0.002));
        // exp(nu) grows like t^(-beta1/xi).
        const double ratio = std::exp(c3.endpoints[2] - c3.endpoints[1]);
        const double expected = std::pow((8.0 + kLogTimeShift) / (2.0 + kLogTimeShift), 0.65 / 0.78);
        CHECK(ratio == doctest::Approx(expected).epsilon(1e-12));

        const EndpointLine line = endpoint_from_m3(m3);
        CHECK(line.nu0 == doctest::Approx(15.5 + 1.60 / 0.78));
        CHECK(line.nu1 == doctest::Approx(0.65 / 0.78));

        GpdFit pos = m1;
        pos.xi = 0.1;
        CHECK_THROWS_AS(endpoint_curve(pos, ts), DomainError);
        CHECK_THROWS_AS(endpoint_from_m3(m1), DomainError);
    }

    TEST_CASE("stability scan on one threshold")
    {
        const Sample s = gpd_sample_at(GpdModel::M1, 15.5, -0.6, 2.0, 0.0, 100, 7);
        const std::vector<double> grid{15.5};
        const StabilityScan scan = stability_scan(s.y, s.t, grid, GpdModel::M1, quick());
        REQUIRE(scan.entries.size() == 1);
        REQUIRE(scan.recommended_u);
        CHECK(*scan.recommended_u == 15.5);
    }

    TEST_CASE("stability scan counts and failures")
    {
        const Sample s = gpd_sample_at(GpdModel::M1, 14.0, -0.6, 2.0, 0.0, 300, 8);
        const std::vector<double> grid{14.4, 15.5, 20.0};
        const StabilityScan scan = stability_scan(s.y, s.t, grid, GpdModel::M1, quick());
        REQUIRE(scan.entries.size() == 3);
        std::size_t above = 0;
        for (double y : s.y)
            above += y > 15.5;
        CHECK(scan.entries[1].n_exceed == above);
        CHECK(scan.entries[0].n_exceed > above);
        CHECK_FALSE(scan.entries[2].fit);
        CHECK_FALSE(scan.entries[2].error.empty());
    }

    TEST_CASE("stability scan does not recommend too high a threshold")
    {
        // Uniform body on [10, 12), GPD tail above the true threshold 12.
        std::vector<double> grid;
        for (double u = 11.0; u <= 13.0 + 1e-9; u += 0.25)
            grid.push_back(u);
        int ok = 0;
        const int reps = 200;
        for (int r = 0; r < reps; ++r) {
            Rng rng(derive_seed(99, r));
            Sample s;
            for (int i = 0; i < 1500; ++i) {
                s.t.push_back(8.0 * i / 1500.0);
                if (rng.uniform() < 0.6)
                    s.y.push_back(10.0 + 2.0 * rng.uniform());
                else
                    s.y.push_back(12.0 + gpd_sample({-0.5, 2.0, 0.0}, rng));
            }
            FitOptions o = quick();
            o.restarts = 1;
            const StabilityScan scan = stability_scan(s.y, s.t, grid, GpdModel::M1, o);
            if (scan.recommended_u && *scan.recommended_u <= 12.0 + 0.25 + 1e-9)
                ++ok;
        }
        CHECK(ok >= 180);
    }

    TEST_CASE("likelihood ratio tests between tail models")
    {
        const Sample s = gpd_sample_at(GpdModel::M3, 15.5, -0.78, 1.6, 0.65, 400, 10);
        const GpdFit m1 = fit_pot(s.y, s.t, 15.5, GpdModel::M1, quick());
        const GpdFit m2 = fit_pot(s.y, s.t, 15.5, GpdModel::M2, quick());
        const GpdFit m3 = fit_pot(s.y, s.t, 15.5, GpdModel::M3, quick());
        CHECK(m2.loglik >= m1.loglik - 1e-6);
        CHECK(m3.loglik >= m1.loglik - 1e-6);
        const LrtResult r = lrt(m1, m3);
        CHECK(r.df == 1);
        CHECK(r.p_value < 0.01);
        CHECK_THROWS_AS(lrt(m3, m1), DomainError);
        CHECK_THROWS_AS(lrt(m2, m3), DomainError);
        const GpdFit other = fit_pot(s.y, s.t, 16.0, GpdModel::M3, quick());
        CHECK_THROWS_AS(lrt(m1, other), DomainError);
        GpdFit same = m1;
        same.model = GpdModel::M2;
        CHECK(lrt(m1, same).p_value == doctest::Approx(1.0));
    }

    TEST_CASE("published log-likelihoods give the LRT p-values they imply")
    {
        // M1 -60 against M2 -57 and M3 -56; the text quotes 0.08 and 0.05.
        CHECK(likelihood_ratio_test(-60.0, -57.0, 1).p_value == doctest::Approx(0.0143).epsilon(0.01));
        CHECK(likelihood_ratio_test(-60.0, -56.0, 1).p_value == doctest::Approx(0.0047).epsilon(0.02));
    }

    TEST_CASE("model names")
    {
        CHECK(to_string(GpdModel::M3) == "M3");
        CHECK(parse_gpd_model("M2") == GpdModel::M2);
        CHECK_FALSE(parse_gpd_model("M9"));
    }
}
