#include <doctest.h>

#include "heavytail/distributions.hpp"
#include "heavytail/error.hpp"
#include "heavytail/montecarlo.hpp"
#include "heavytail/severity.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

using namespace heavytail;

namespace {

const double kLu = std::log(5e4);

struct Sample {
    std::vector<double> y;
    std::vector<double> t;
};

Sample dte_draws(const SeverityModel& m, std::size_t n, std::uint64_t seed, double horizon = 8.0)
{
    Rng rng(seed);
    Sample s;
    for (std::size_t i = 0; i < n; ++i)
        s.t.push_back(horizon * (i + 0.5) / n);
    s.y = simulate_log_sizes(m, s.t, rng);
    return s;
}

SeverityModel model(DteModel tag, double a0, double a1, double nu0, double nu1 = 0.0)
{
    SeverityModel m;
    m.model = tag;
    m.u = kLu;
    m.alpha0 = a0;
    m.alpha1 = a1;
    m.nu0 = nu0;
    m.nu1 = nu1;
    return m;
}

SeverityOptions quick()
{
    SeverityOptions o;
    o.n_boot = 0;
    o.n_null = 0;
    return o;
}

// Root of the D0 score in alpha with nu at the sample maximum, by bisection.
double d0_alpha_oracle(const std::vector<double>& y)
{
    const double nu = *std::max_element(y.begin(), y.end());
    const double L = nu - kLu;
    double mean_excess = 0.0;
    for (double v : y)
        mean_excess += v - kLu;
    mean_excess /= static_cast<double>(y.size());
    const auto score = [&](double a) {
        return 1.0 / a - mean_excess - L * std::exp(-a * L) / (1.0 - std::exp(-a * L));
    };
    double lo = 1e-3, hi = 10.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (score(mid) > 0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

} // namespace

TEST_SUITE("severity")
{
    TEST_CASE("D0 matches the score-equation oracle")
    {
        const Sample s = dte_draws(model(DteModel::D0, 0.47, 0.0, 18.839), 619, 1);
        const DtpFit f = fit_dte(s.y, s.t, 5e4, DteModel::D0, std::nullopt, quick());
        CHECK(f.converged);
        CHECK(f.nu0 == doctest::Approx(*std::max_element(s.y.begin(), s.y.end())).epsilon(1e-9));
        CHECK(f.alpha0 == doctest::Approx(d0_alpha_oracle(s.y)).epsilon(1e-5));
        CHECK(f.free_parameters() == 2);
    }

    TEST_CASE("D0STAR is the exponential MLE")
    {
        const Sample s = dte_draws(model(DteModel::D0Star, 0.6, 0.0, kInf), 500, 2);
        const DtpFit f = fit_dte(s.y, s.t, 5e4, DteModel::D0Star, std::nullopt, quick());
        double mean_excess = 0.0;
        for (double v : s.y)
            mean_excess += v - kLu;
        mean_excess /= static_cast<double>(s.y.size());
        CHECK(f.alpha0 == doctest::Approx(1.0 / mean_excess).epsilon(1e-5));
        CHECK(std::isinf(f.nu0));
    }

    TEST_CASE("D1 recovers a drifting shape")
    {
        const Sample s = dte_draws(model(DteModel::D1, 0.5, -0.02, 19.0), 2000, 3);
        const DtpFit f = fit_dte(s.y, s.t, 5e4, DteModel::D1, std::nullopt, quick());
        CHECK(std::abs(f.alpha0 - 0.5) < 0.05);
        CHECK(std::abs(f.alpha1 + 0.02) < 0.01);
        const DtpFit d0 = fit_dte(s.y, s.t, 5e4, DteModel::D0, std::nullopt, quick());
        CHECK(f.loglik >= d0.loglik - 1e-6);
    }

    TEST_CASE("D2 with a supplied endpoint line")
    {
        const EndpointLine line{15.5 + 1.60 / 0.78, 0.65 / 0.78};
        const Sample s = dte_draws(model(DteModel::D2, 0.57, -0.025, line.nu0, line.nu1), 2000, 4);
        const DtpFit f = fit_dte(s.y, s.t, 5e4, DteModel::D2, line, quick());
        CHECK(std::abs(f.alpha0 - 0.57) < 0.05);
        CHECK(std::abs(f.alpha1 + 0.025) < 0.01);
        CHECK(f.nu0 == line.nu0);
        CHECK(f.nu1 == line.nu1);
        CHECK_THROWS_AS(fit_dte(s.y, s.t, 5e4, DteModel::D2, std::nullopt, quick()), DomainError);
        const EndpointLine low{14.0, 0.0};
        CHECK_THROWS_AS(fit_dte(s.y, s.t, 5e4, DteModel::D2, low, quick()), DomainError);
    }

    TEST_CASE("input checks")
    {
        const Sample s = dte_draws(model(DteModel::D0, 0.5, 0.0, 19.0), 29, 5);
        CHECK_THROWS_AS(fit_dte(s.y, s.t, 5e4, DteModel::D0, std::nullopt, quick()), EstimationError);
        Sample b = dte_draws(model(DteModel::D0, 0.5, 0.0, 19.0), 40, 5);
        b.y[3] = kLu - 1.0;
        CHECK_THROWS_AS(fit_dte(b.y, b.t, 5e4, DteModel::D0, std::nullopt, quick()), DomainError);
    }

    TEST_CASE("bootstrap errors follow the Fisher information")
    {
        // Known-endpoint information per observation for DTE(alpha, L).
        const double a = 0.47, L = 18.839 - kLu;
        const double e = std::exp(-a * L);
        const double info = 1.0 / (a * a) - L * L * e / ((1 - e) * (1 - e));
        const double se_oracle = 1.0 / std::sqrt(619 * info);
        const Sample s = dte_draws(model(DteModel::D0, a, 0.0, 18.839), 619, 6);
        SeverityOptions o = quick();
        o.n_boot = 300;
        o.seed = 17;
        const DtpFit f = fit_dte(s.y, s.t, 5e4, DteModel::D0, std::nullopt, o);
        CHECK(f.boot_ok + f.boot_failed == 300);
        CHECK(f.alpha0_se == doctest::Approx(se_oracle).epsilon(0.15));
        CHECK(f.nu0_se > 0.0);
    }

    TEST_CASE("slope p-value from null simulation")
    {
        const Sample s = dte_draws(model(DteModel::D1, 0.58, -0.027, 18.839), 619, 7);
        SeverityOptions o = quick();
        o.n_null = 200;
        o.seed = 23;
        const DtpFit f = fit_dte(s.y, s.t, 5e4, DteModel::D1, std::nullopt, o);
        REQUIRE(f.alpha1_p);
        CHECK(*f.alpha1_p > 0.0);
        CHECK(*f.alpha1_p < 0.05);

        const Sample flat = dte_draws(model(DteModel::D1, 0.5, 0.0, 18.839), 619, 8);
        const DtpFit g = fit_dte(flat.y, flat.t, 5e4, DteModel::D1, std::nullopt, o);
        REQUIRE(g.alpha1_p);
        CHECK(*g.alpha1_p > 0.01);
    }

    TEST_CASE("current shape")
    {
        DtpFit d2;
        d2.model = DteModel::D2;
        d2.u = 5e4;
        d2.alpha0 = 0.57;
        d2.alpha1 = -0.025;
        d2.nu0 = 15.5 + 1.60 / 0.78;
        d2.nu1 = 0.65 / 0.78;
        CHECK(current_shape(d2, 0.0).alpha == doctest::Approx(0.57));
        CHECK(current_shape(d2, 8.0).alpha == doctest::Approx(0.364).epsilon(0.02));
        CHECK(current_shape(d2, 8.0).max_size == doctest::Approx(std::exp(d2.nu(8.0))));
        DtpFit d0 = d2;
        d0.model = DteModel::D0;
        d0.alpha1 = 0.0;
        CHECK(current_shape(d0, 3.0).alpha == current_shape(d0, 7.0).alpha);
        CHECK_THROWS_AS(current_shape(d2, 30.0), DomainError);
    }

    TEST_CASE("stationarity transform")
    {
        const Sample s = dte_draws(model(DteModel::D0, 0.5, 0.0, 19.0), 300, 9);
        const DtpFit d0 = fit_dte(s.y, s.t, 5e4, DteModel::D0, std::nullopt, quick());
        const TransformedSample id = stationarity_transform(s.y, s.t, d0);
        for (std::size_t i = 0; i < s.y.size(); ++i)
            CHECK(id.values[i] == doctest::Approx(s.y[i]).epsilon(1e-14));

        // Exactness: mapping DTE(alpha(t), u, nu(t)) draws through the
        // transform gives DTE(alpha0, u, nu*(t)) probabilities.
        DtpFit d1;
        d1.model = DteModel::D1;
        d1.u = 5e4;
        d1.alpha0 = 0.6;
        d1.alpha1 = -0.03;
        d1.nu0 = 19.0;
        const std::vector<double> y{12.0, 15.0, 18.5};
        const std::vector<double> t{1.0, 4.0, 7.0};
        const TransformedSample ts = stationarity_transform(y, t, d1);
        for (std::size_t i = 0; i < y.size(); ++i) {
            const double before = dte_cdf(y[i], {d1.alpha(t[i]), kLu, d1.nu0});
            const double after = dte_cdf(ts.values[i], {d1.alpha0, kLu, ts.nu_star[i]});
            CHECK(after == doctest::Approx(before).epsilon(1e-12));
        }
    }

    TEST_CASE("transformed D2 samples pass KS at the nominal rate")
    {
        const EndpointLine line{15.5 + 1.60 / 0.78, 0.65 / 0.78};
        const SeverityModel truth = model(DteModel::D2, 0.57, -0.025, line.nu0, line.nu1);
        std::vector<double> pvals;
        for (int r = 0; r < 200; ++r) {
            Sample s = dte_draws(truth, 619, derive_seed(31, r));
            DtpFit f;
            f.model = DteModel::D2;
            f.u = 5e4;
            f.alpha0 = truth.alpha0;
            f.alpha1 = truth.alpha1;
            f.nu0 = line.nu0;
            f.nu1 = line.nu1;
            const TransformedSample ts = stationarity_transform(s.y, s.t, f);
            // Exact probability integral transform against each point's law.
            std::vector<double> u(ts.values.size());
            for (std::size_t i = 0; i < u.size(); ++i)
                u[i] = dte_cdf(ts.values[i], {f.alpha0, kLu, ts.nu_star[i]});
            pvals.push_back(ks_test(u, [](double x) { return std::clamp(x, 0.0, 1.0); }).p_value);
        }
        const KsResult meta = ks_test(pvals, [](double p) { return std::clamp(p, 0.0, 1.0); });
        CHECK(meta.p_value > 0.01);
    }

    TEST_CASE("ks against the stationary reference")
    {
        const Sample s = dte_draws(model(DteModel::D0, 0.5, 0.0, 19.0), 619, 10);
        const DtpFit d0 = fit_dte(s.y, s.t, 5e4, DteModel::D0, std::nullopt, quick());
        const TransformedSample ts = stationarity_transform(s.y, s.t, d0);
        CHECK(ts.reference.alpha == d0.alpha0);
        CHECK(ts.reference.nu == doctest::Approx(d0.nu0));
        CHECK(ks_stationary(ts).p_value > 0.01);
    }

    TEST_CASE("tail scan")
    {
        const Sample s = dte_draws(model(DteModel::D0, 0.45, 0.0, 19.0), 619, 11);
        const std::vector<double> one{5e4};
        const auto single = alpha_tail_scan(s.y, one);
        REQUIRE(single.size() == 1);
        CHECK(single[0].n == 619);
        CHECK(single[0].alpha == doctest::Approx(d0_alpha_oracle(s.y)).epsilon(1e-5));

        const std::vector<double> grid{5e4, 5e5, 5e6, 5e7, 1e9};
        const auto scan = alpha_tail_scan(s.y, grid);
        REQUIRE(scan.size() == 5);
        CHECK(scan[4].error.size() > 0);
        CHECK(scan[1].n < scan[0].n);
    }

    TEST_CASE("tail scan is flat on DTP data")
    {
        const std::vector<double> grid{5e4, 2e5, 1e6, 5e6};
        int flat = 0;
        const int reps = 200;
        for (int r = 0; r < reps; ++r) {
            const Sample s = dte_draws(model(DteModel::D0, 0.45, 0.0, 19.0), 619, derive_seed(41, r));
            const auto scan = alpha_tail_scan(s.y, grid);
            bool ok = true;
            // Flat: every threshold agrees with the lowest one within its own 2 se.
            for (const auto& e : scan)
                ok = ok && e.error.empty() && std::abs(e.alpha - scan[0].alpha) < 2 * e.se;
            flat += ok;
        }
        CHECK(flat >= 180);
    }

    TEST_CASE("nested severity tests")
    {
        const Sample s = dte_draws(model(DteModel::D1, 0.58, -0.027, 18.839), 2000, 12);
        const DtpFit star = fit_dte(s.y, s.t, 5e4, DteModel::D0Star, std::nullopt, quick());
        const DtpFit d0 = fit_dte(s.y, s.t, 5e4, DteModel::D0, std::nullopt, quick());
        const DtpFit d1 = fit_dte(s.y, s.t, 5e4, DteModel::D1, std::nullopt, quick());
        CHECK(d0.loglik >= star.loglik);
        CHECK(d1.loglik >= d0.loglik - 1e-6);
        CHECK(lrt(star, d0).df == 1);
        CHECK(lrt(star, d1).df == 2);
        CHECK(lrt(d0, d1).df == 1);
        CHECK(lrt(d0, d1).p_value < 0.05);
        CHECK_THROWS_AS(lrt(d1, d0), DomainError);
        // Published log-likelihoods: D0STAR -1032.9, D0 -1020.7, D1 -1017.0,
        // D2 -1013.3.
        CHECK(likelihood_ratio_test(-1032.9, -1020.7, 1).p_value < 1e-5);
        CHECK(likelihood_ratio_test(-1020.7, -1017.0, 1).p_value == doctest::Approx(0.006).epsilon(0.15));
        CHECK(likelihood_ratio_test(-1017.0, -1013.3, 1).p_value == doctest::Approx(0.007).epsilon(0.15));
    }
}
