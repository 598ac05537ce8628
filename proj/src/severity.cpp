#include "heavytail/severity.hpp"

#include "heavytail/distributions.hpp"
#include "heavytail/error.hpp"
#include "heavytail/montecarlo.hpp"
#include "heavytail/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace heavytail {

namespace {

constexpr std::size_t kMinSample = 30;
constexpr std::size_t kMinScanPoints = 20;
constexpr double kShapeFloor = 1e-4; // alpha(t) below this counts as constrained

struct Sample {
    double lu = 0.0;
    std::vector<double> y;
    std::vector<double> t;
};

struct ShapeFit {
    double alpha0 = 0.0;
    double alpha1 = 0.0;
    double loglik = 0.0;
    bool converged = false;
    bool constrained = false;
};

// Maximises over (alpha0[, alpha1]) with the endpoint of `base` held fixed.
ShapeFit fit_shape(const Sample& s, const SeverityModel& base, bool slope, int restarts, std::uint64_t seed)
{
    const std::size_t n = s.y.size();
    std::vector<double> nu(n);
    for (std::size_t i = 0; i < n; ++i)
        nu[i] = base.nu(s.t[i]);

    const Objective f = [&](std::span<const double> th) {
        const double a0 = th[0];
        const double a1 = slope ? th[1] : 0.0;
        double ll = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double a = a0 + a1 * s.t[i];
            if (!(a > 0.0))
                return kInf;
            ll += dte_log_pdf(s.y[i], {a, s.lu, nu[i]});
        }
        return std::isfinite(ll) ? -ll : kInf;
    };

    double excess = 0.0;
    for (double y : s.y)
        excess += y - s.lu;
    const double a_start = static_cast<double>(n) / std::max(excess, 1e-12);

    std::vector<double> start{a_start};
    std::vector<double> steps{0.2 * a_start};
    if (slope) {
        start.push_back(0.0);
        const auto [lo, hi] = std::minmax_element(s.t.begin(), s.t.end());
        steps.push_back(0.2 * a_start / std::max(1.0, *hi - *lo));
    }

    SimplexOptions opt;
    opt.restarts = restarts;
    opt.seed = seed;
    const OptimResult r = minimize(f, start, steps, opt);
    if (!std::isfinite(r.value))
        throw EstimationError("DTE fit: no finite likelihood found");

    ShapeFit out;
    out.alpha0 = r.x[0];
    out.alpha1 = slope ? r.x[1] : 0.0;
    out.loglik = -r.value;
    out.converged = r.converged;
    double a_min = kInf;
    for (double t : s.t)
        a_min = std::min(a_min, out.alpha0 + out.alpha1 * t);
    out.constrained = a_min < kShapeFloor;
    return out;
}

SeverityModel base_model(DteModel model, double lu, std::span<const double> y, const std::optional<EndpointLine>& e)
{
    SeverityModel m;
    m.model = model;
    m.u = lu;
    switch (model) {
    case DteModel::D0Star:
        m.nu0 = kInf;
        break;
    case DteModel::D0:
    case DteModel::D1:
        m.nu0 = *std::max_element(y.begin(), y.end());
        break;
    case DteModel::D2:
        m.nu0 = e->nu0;
        m.nu1 = e->nu1;
        break;
    }
    return m;
}

std::vector<double> parameter_vector(DteModel model, const ShapeFit& f, double nu0)
{
    switch (model) {
    case DteModel::D0Star:
        return {f.alpha0};
    case DteModel::D0:
        return {f.alpha0, nu0};
    case DteModel::D1:
        return {f.alpha0, f.alpha1, nu0};
    case DteModel::D2:
        break;
    }
    return {f.alpha0, f.alpha1};
}

bool slope_of(DteModel m)
{
    return m == DteModel::D1 || m == DteModel::D2;
}

// Simulates log sizes at the observed times and refits; nullopt on failure.
std::optional<ShapeFit> refit(const Sample& s, const SeverityModel& truth, DteModel model,
                              const std::optional<EndpointLine>& endpoint, int restarts, Rng& rng,
                              double* nu0_out = nullptr)
{
    Sample sim;
    sim.lu = s.lu;
    sim.t = s.t;
    sim.y = simulate_log_sizes(truth, s.t, rng);
    try {
        const SeverityModel base = base_model(model, s.lu, sim.y, endpoint);
        const ShapeFit f = fit_shape(sim, base, slope_of(model), restarts, rng.bits());
        if (!f.converged)
            return std::nullopt;
        if (nu0_out)
            *nu0_out = base.nu0;
        return f;
    } catch (const Error&) {
        return std::nullopt;
    }
}

double median(std::vector<double> v)
{
    const std::size_t mid = v.size() / 2;
    std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
    double m = v[mid];
    if (v.size() % 2 == 0)
        m = 0.5 * (m + *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid)));
    return m;
}

} // namespace

// ---------------------------------------------------------------------------

EndpointLine endpoint_from_m3(const GpdFit& fit)
{
    if (fit.model != GpdModel::M3)
        throw DomainError("endpoint conversion needs an M3 fit");
    if (!(fit.xi < 0.0))
        throw DomainError("endpoint conversion needs xi < 0");
    return {fit.u - fit.beta0 / fit.xi, -fit.beta1 / fit.xi};
}

SeverityModel DtpFit::severity() const
{
    SeverityModel m;
    m.model = model;
    m.u = std::log(u);
    m.alpha0 = alpha0;
    m.alpha1 = alpha1;
    m.nu0 = nu0;
    m.nu1 = nu1;
    return m;
}

int DtpFit::free_parameters() const
{
    switch (model) {
    case DteModel::D0Star:
        return 1;
    case DteModel::D0:
        return 2;
    case DteModel::D1:
        return 3;
    case DteModel::D2:
        break;
    }
    return 4;
}

DtpFit fit_dte(std::span<const double> log_sizes, std::span<const double> times, double u, DteModel model,
               std::optional<EndpointLine> endpoint, const SeverityOptions& options)
{
    if (log_sizes.size() != times.size())
        throw DomainError("log sizes and times differ in length");
    if (!(u > 0.0))
        throw DomainError("lower truncation u must be positive");
    if (log_sizes.size() < kMinSample)
        throw EstimationError("DTE fit needs at least " + std::to_string(kMinSample) + " events, got " +
                              std::to_string(log_sizes.size()));

    Sample s;
    s.lu = std::log(u);
    s.y.assign(log_sizes.begin(), log_sizes.end());
    s.t.assign(times.begin(), times.end());
    for (double y : s.y)
        if (!(y > s.lu))
            throw DomainError("all sizes must exceed the lower truncation u = " + std::to_string(u));

    if (model == DteModel::D2) {
        if (!endpoint)
            throw DomainError("D2 needs an endpoint line (nu0, nu1)");
        for (std::size_t i = 0; i < s.y.size(); ++i) {
            const double nu = endpoint->nu0 + endpoint->nu1 * std::log(s.t[i] + kLogTimeShift);
            if (s.y[i] > nu)
                throw DomainError("log size " + std::to_string(s.y[i]) + " exceeds the D2 endpoint " +
                                  std::to_string(nu) + " at t = " + std::to_string(s.t[i]));
        }
    }

    const SeverityModel base = base_model(model, s.lu, s.y, endpoint);
    const ShapeFit f = fit_shape(s, base, slope_of(model), options.restarts, options.seed);

    DtpFit fit;
    fit.model = model;
    fit.u = u;
    fit.n = s.y.size();
    fit.alpha0 = f.alpha0;
    fit.alpha1 = f.alpha1;
    fit.nu0 = base.nu0;
    fit.nu1 = base.nu1;
    fit.loglik = f.loglik;
    fit.converged = f.converged;
    fit.constrained = f.constrained;
    fit.seed = options.seed;
    const auto [lo, hi] = std::minmax_element(s.t.begin(), s.t.end());
    fit.t_first = *lo;
    fit.t_last = *hi;

    if (options.n_boot > 0) {
        const SeverityModel truth = fit.severity();
        const std::size_t n_params = parameter_vector(model, f, fit.nu0).size();
        const Replicate replicate = [&](Rng& rng) -> std::optional<std::vector<double>> {
            double nu0 = 0.0;
            const auto r = refit(s, truth, model, endpoint, options.restarts, rng, &nu0);
            if (!r)
                return std::nullopt;
            return parameter_vector(model, *r, nu0);
        };
        const BootstrapResult boot =
            bootstrap_se(n_params, replicate, options.n_boot, derive_seed(options.seed, 0xB007), options.threads);
        fit.alpha0_se = boot.se[0];
        switch (model) {
        case DteModel::D0:
            fit.nu0_se = boot.se[1];
            break;
        case DteModel::D1:
            fit.alpha1_se = boot.se[1];
            fit.nu0_se = boot.se[2];
            break;
        case DteModel::D2:
            fit.alpha1_se = boot.se[1];
            break;
        case DteModel::D0Star:
            break;
        }
        fit.boot_ok = boot.n_ok;
        fit.boot_failed = boot.n_failed;
    }

    if (fit.has_slope() && options.n_null > 0) {
        // Null: same endpoint rule, constant shape.
        const ShapeFit null_fit = fit_shape(s, base, false, options.restarts, options.seed);
        SeverityModel null_truth = base;
        null_truth.alpha0 = null_fit.alpha0;
        null_truth.alpha1 = 0.0;
        const auto statistic = [&](Rng& rng) -> std::optional<double> {
            const auto r = refit(s, null_truth, model, endpoint, options.restarts, rng);
            if (!r)
                return std::nullopt;
            return r->alpha1;
        };
        fit.alpha1_p = null_pvalue(statistic, fit.alpha1, options.n_null, derive_seed(options.seed, 0x4E11),
                                   options.threads)
                           .p_value;
    }
    return fit;
}

DtpFit fit_dte(const BreachCatalog& catalog, double u, DteModel model, std::optional<EndpointLine> endpoint,
               const SeverityOptions& options)
{
    return fit_dte(catalog.known_log_sizes(), catalog.known_times(), u, model, endpoint, options);
}

CurrentShape current_shape(const DtpFit& fit, double t)
{
    CurrentShape c;
    c.t = t;
    c.alpha = fit.alpha(t);
    if (!(c.alpha > 0.0))
        throw DomainError("shape alpha(t) = " + std::to_string(c.alpha) + " is not positive at t = " +
                          std::to_string(t));
    c.max_size = std::exp(fit.nu(t));
    return c;
}

TransformedSample stationarity_transform(std::span<const double> log_sizes, std::span<const double> times,
                                         const DtpFit& fit)
{
    if (log_sizes.size() != times.size())
        throw DomainError("log sizes and times differ in length");
    if (log_sizes.empty())
        throw DomainError("empty sample");
    const double lu = std::log(fit.u);
    TransformedSample out;
    out.values.reserve(log_sizes.size());
    out.nu_star.reserve(log_sizes.size());
    for (std::size_t i = 0; i < log_sizes.size(); ++i) {
        const double r = fit.alpha(times[i]) / fit.alpha0;
        out.values.push_back(lu + (log_sizes[i] - lu) * r);
        out.nu_star.push_back(lu + (fit.nu(times[i]) - lu) * r);
    }
    out.reference = {fit.alpha0, lu, median(out.nu_star)};
    return out;
}

TransformedSample stationarity_transform(const BreachCatalog& catalog, const DtpFit& fit)
{
    return stationarity_transform(catalog.known_log_sizes(), catalog.known_times(), fit);
}

KsResult ks_stationary(const TransformedSample& sample)
{
    const DteParams ref = sample.reference;
    return ks_test(sample.values, [ref](double y) {
        if (y <= ref.u)
            return 0.0;
        if (y >= ref.nu)
            return 1.0;
        return dte_cdf(y, ref);
    });
}

std::vector<TailScanEntry> alpha_tail_scan(std::span<const double> log_sizes, std::span<const double> u_grid)
{
    std::vector<TailScanEntry> out;
    for (double u : u_grid) {
        TailScanEntry e;
        e.u = u;
        if (!(u > 0.0)) {
            e.error = "lower truncation must be positive";
            out.push_back(e);
            continue;
        }
        Sample s;
        s.lu = std::log(u);
        for (double y : log_sizes)
            if (y > s.lu)
                s.y.push_back(y);
        s.t.assign(s.y.size(), 0.0);
        e.n = s.y.size();
        if (e.n < kMinScanPoints) {
            e.error = "only " + std::to_string(e.n) + " points above u (need " + std::to_string(kMinScanPoints) + ")";
            out.push_back(e);
            continue;
        }
        try {
            const SeverityModel base = base_model(DteModel::D0, s.lu, s.y, std::nullopt);
            const ShapeFit f = fit_shape(s, base, false, 2, 0x5CA11);
            e.alpha = f.alpha0;
            e.nu = base.nu0;
            const double L = base.nu0 - s.lu;
            const double a = f.alpha0;
            const double em = std::exp(-a * L);
            const double denom = -std::expm1(-a * L);
            const double info = static_cast<double>(e.n) * (1.0 / (a * a) - L * L * em / (denom * denom));
            e.se = info > 0.0 ? 1.0 / std::sqrt(info) : kInf;
        } catch (const Error& err) {
            e.error = err.what();
        }
        out.push_back(e);
    }
    return out;
}

LrtResult lrt(const DtpFit& nested, const DtpFit& full)
{
    using M = DteModel;
    const M a = nested.model;
    const M b = full.model;
    const bool ok = (a == M::D0Star && (b == M::D0 || b == M::D1)) || (a == M::D0 && b == M::D1) ||
                    (a == M::D1 && b == M::D2);
    if (!ok)
        throw DomainError("models " + to_string(a) + " and " + to_string(b) + " are not nested");
    if (nested.n != full.n || nested.u != full.u)
        throw DomainError("nested fits must share lower truncation and data");
    return likelihood_ratio_test(nested.loglik, full.loglik, full.free_parameters() - nested.free_parameters());
}

} // namespace heavytail
