#include <doctest.h>

#include "heavytail/error.hpp"
#include "heavytail/montecarlo.hpp"
#include "heavytail/projection.hpp"

#include <cmath>
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

// Endpoint line from the M3 tail fit (u 15.5, xi -0.78, beta 1.60 + 0.65 ln t).
SeverityModel d2()
{
    SeverityModel m = d0();
    m.model = DteModel::D2;
    m.alpha0 = 0.57;
    m.alpha1 = -0.025;
    m.nu0 = 15.5 + 1.60 / 0.78;
    m.nu1 = 0.65 / 0.78;
    return m;
}

} // namespace

TEST_SUITE("projection")
{
    TEST_CASE("expected cumulative sum for D0 matches the observed total")
    {
        const auto curve = expected_cumsum_curve(d0(), 619, 75.5);
        REQUIRE(curve.size() == 619);
        const DtpMoments m = dtp_moments(d0().sizes_at(0.0));
        CHECK(curve.back().mean == doctest::Approx(619 * m.mean).epsilon(1e-12));
        CHECK(curve.back().sd == doctest::Approx(std::sqrt(619.0) * m.sd()).epsilon(1e-12));
        CHECK(std::abs(curve.back().mean - 1.962e9) < curve.back().sd);
        CHECK(curve[0].n == 1);
        CHECK(curve[9].t == doctest::Approx(10 / 75.5));
        CHECK(expected_cumsum_curve(d0(), 0, 75.5).empty());
        CHECK_THROWS_AS(expected_cumsum_curve(d0(), 10, 0.0), DomainError);

        SeverityModel open = d0();
        open.model = DteModel::D0Star;
        open.nu0 = kInf;
        CHECK_THROWS_AS(expected_cumsum_curve(open, 10, 75.5), InfiniteMomentError);
    }

    TEST_CASE("D2 curve against simulated cumulative sums")
    {
        const SeverityModel m = d2();
        const std::size_t n = 619;
        const auto curve = expected_cumsum_curve(m, n, 75.5);
        std::vector<double> times;
        for (const auto& p : curve)
            times.push_back(p.t);
        const int reps = 10000;
        double sum = 0.0;
        double sum_sq = 0.0;
        Rng rng(619);
        for (int r = 0; r < reps; ++r) {
            double c = 0.0;
            for (double y : simulate_log_sizes(m, times, rng))
                c += std::exp(y);
            sum += c;
            sum_sq += c * c;
        }
        const double mean = sum / reps;
        const double sd = std::sqrt(sum_sq / reps - mean * mean);
        CHECK(mean == doctest::Approx(curve.back().mean).epsilon(0.01));
        CHECK(sd == doctest::Approx(curve.back().sd).epsilon(0.05));
    }

    TEST_CASE("crossover")
    {
        CHECK(clt_crossover(5e4, 1.6e8, 0.5) == doctest::Approx(56.57).epsilon(0.01 / 56.57));
        CHECK(clt_crossover(5e4, 5e4, 0.7) == 1.0);
        CHECK(clt_crossover(5e4, 1.6e8, 1.0) == doctest::Approx(1.6e8 / 5e4).epsilon(1e-15));
        CHECK_THROWS_AS(clt_crossover(5e4, 1e4, 0.5), DomainError);
        CHECK_THROWS_AS(clt_crossover(5e4, 1e8, 0.0), DomainError);
    }

    TEST_CASE("superlinear reference")
    {
        CHECK(superlinear_reference(5e4, 0.5, 200) == doctest::Approx(2e9).epsilon(1e-12));
        CHECK(superlinear_reference(5e4, 0.47, 1) == 5e4);
        const double a = superlinear_reference(5e4, 0.47, 300);
        const double b = superlinear_reference(5e4, 0.47, 600);
        CHECK(b / a == doctest::Approx(std::pow(2.0, 1.0 / 0.47)).epsilon(1e-12));
        CHECK_THROWS_AS(superlinear_reference(5e4, -1.0, 10), DomainError);
    }

    TEST_CASE("D0 forecast")
    {
        const Forecast f = forecast(d0(), 75.5, 229.0, Anchor{2014, 18.16e8}, 2019);
        REQUIRE(f.rows.size() == 5);
        CHECK(f.model == "D0");
        CHECK(f.rows[0].year == 2015);
        CHECK(f.rows[0].annual_mean == doctest::Approx(2.37e8).epsilon(0.05));
        CHECK(f.rows[0].annual_sd == doctest::Approx(1.14e8).epsilon(0.10));
        CHECK(f.rows[4].cumulative_mean == doctest::Approx(30.0e8).epsilon(0.01));
        double cum = 18.16e8;
        for (const auto& r : f.rows) {
            CHECK(r.annual_mean == doctest::Approx(f.rows[0].annual_mean).epsilon(1e-12));
            cum += r.annual_mean;
            CHECK(r.cumulative_mean == doctest::Approx(cum).epsilon(1e-12));
        }
        CHECK(f.rows[4].cumulative_sd == doctest::Approx(std::sqrt(5.0) * f.rows[0].annual_sd).epsilon(1e-12));
        CHECK(f.rows[0].t == doctest::Approx(2922.0 / 365.25 + 0.5));
    }

    TEST_CASE("D2 forecast grows each year")
    {
        const Forecast f = forecast(d2(), 75.5, 229.0, Anchor{2014, 18.16e8}, 2019);
        for (std::size_t i = 1; i < f.rows.size(); ++i) {
            CHECK(f.rows[i].annual_mean > f.rows[i - 1].annual_mean);
            CHECK(f.rows[i].cumulative_mean > f.rows[i - 1].cumulative_mean);
        }
        CHECK(f.rows.back().cumulative_mean == doctest::Approx(55.0e8).epsilon(0.05));
    }

    TEST_CASE("degenerate severity and fixed counts give no variance")
    {
        SeverityModel m = d0();
        m.nu0 = m.u + 1e-9;
        const Forecast f = forecast(m, 10.0, 0.0, Anchor{2014, 0.0}, 2016);
        for (const auto& r : f.rows) {
            CHECK(r.annual_mean == doctest::Approx(10.0 * 5e4).epsilon(1e-8));
            CHECK(r.annual_sd < 1e-8 * r.annual_mean);
        }
    }

    TEST_CASE("zero rate gives a flat cumulative series")
    {
        const Forecast f = forecast(d0(), 0.0, 0.0, Anchor{2014, 18.16e8}, 2019);
        for (const auto& r : f.rows)
            CHECK(r.cumulative_mean == 18.16e8);
    }

    TEST_CASE("forecast preconditions")
    {
        CHECK_THROWS_AS(forecast(d0(), -1.0, 0.0, Anchor{}, 2019), DomainError);
        CHECK_THROWS_AS(forecast(d0(), 1.0, -1.0, Anchor{}, 2019), DomainError);
        CHECK_THROWS_AS(forecast(d0(), 1.0, 1.0, Anchor{2014, 0.0}, 2014), DomainError);
        CHECK_THROWS_AS(forecast(d0(), 1.0, 1.0, Anchor{2004, 0.0}, 2008), DomainError);
    }
}
