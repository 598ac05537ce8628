#include "heavytail/evt.hpp"

#include "heavytail/distributions.hpp"
#include "heavytail/error.hpp"
#include "heavytail/models.hpp"
#include "heavytail/montecarlo.hpp"
#include "heavytail/optimize.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace heavytail {

namespace {

// Each observation must sit at least this far below its own endpoint.
// Caps the likelihood, which is unbounded for xi < -1 as the endpoint
// approaches the sample maximum.
constexpr double kEndpointMargin = 1e-6;
constexpr std::size_t kMinExceedances = 10;

double scale_at(GpdModel model, double beta0, double beta1, double t)
{
    switch (model) {
    case GpdModel::M2:
        return beta0 + beta1 * t;
    case GpdModel::M3:
        return beta0 + beta1 * std::log(t + kLogTimeShift);
    default:
        return beta0;
    }
}

struct Decoded {
    double xi;
    double beta0;
    double beta1;
};

struct Exceedances {
    std::vector<double> x; // y - u
    std::vector<double> t;
};

double time_covariate(GpdModel model, double t)
{
    return scale_at(model, 0.0, 1.0, t);
}

// Smallest beta0 keeping beta0 and the scale at every observation positive
// and every observation inside the support, given xi and beta1.
double beta0_floor(GpdModel model, double xi, double beta1, const Exceedances& d)
{
    const double neg = std::max(0.0, -xi);
    double floor = 0.0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        const double need = neg * (d.x[i] + kEndpointMargin * (1.0 + 1e-9));
        floor = std::max(floor, need - beta1 * time_covariate(model, d.t[i]));
    }
    return floor;
}

// Search coordinates: M0 uses (sqrt xi, log beta). The others use xi, a
// square-root slack above beta0_floor and beta1, so the edge of the support
// is the flat plane slack = 0 rather than a curved surface.
Decoded decode(GpdModel model, std::span<const double> th, const Exceedances& d)
{
    if (model == GpdModel::M0)
        return {th[0] * th[0], std::exp(th[1]), 0.0};
    const double beta1 = model == GpdModel::M1 ? 0.0 : th[2];
    return {th[0], beta0_floor(model, th[0], beta1, d) + th[1] * th[1], beta1};
}

std::vector<double> encode(GpdModel model, const Decoded& p, const Exceedances& d)
{
    if (model == GpdModel::M0)
        return {std::sqrt(std::max(p.xi, 0.0)), std::log(p.beta0)};
    const double slack = std::sqrt(std::max(p.beta0 - beta0_floor(model, p.xi, p.beta1, d), 0.0));
    if (model == GpdModel::M1)
        return {p.xi, slack};
    return {p.xi, slack, p.beta1};
}

double negative_loglik(GpdModel model, const Decoded& p, const Exceedances& d)
{
    double ll = 0.0;
    for (std::size_t i = 0; i < d.x.size(); ++i) {
        const double b = scale_at(model, p.beta0, p.beta1, d.t[i]);
        if (!(b > 0.0))
            return kInf;
        if (p.xi < 0.0 && d.x[i] > -b / p.xi - kEndpointMargin)
            return kInf;
        ll += gpd_log_pdf(d.x[i], {p.xi, b, 0.0});
    }
    return std::isfinite(ll) ? -ll : kInf;
}

// Method-of-moments start for (xi, beta), nudged so that every exceedance
// lies inside the support.
Decoded moment_start(const Exceedances& d)
{
    const double n = static_cast<double>(d.x.size());
    const double m = std::accumulate(d.x.begin(), d.x.end(), 0.0) / n;
    double v = 0.0;
    for (double x : d.x)
        v += (x - m) * (x - m);
    v /= std::max(1.0, n - 1.0);
    const double r = m * m / std::max(v, 1e-12);
    double xi = std::clamp(0.5 * (1.0 - r), -0.9, 0.9);
    double beta = std::max(0.5 * m * (r + 1.0), 1e-6);
    const double max_x = *std::max_element(d.x.begin(), d.x.end());
    if (xi < 0.0 && -beta / xi < max_x * 1.05 + kEndpointMargin)
        beta = -xi * (max_x * 1.05 + 10.0 * kEndpointMargin);
    return {xi, beta, 0.0};
}

struct PointFit {
    Decoded p;
    double loglik;
    bool converged;
};

PointFit fit_point(const Exceedances& d, GpdModel model, int restarts, std::uint64_t seed)
{
    SimplexOptions opt;
    opt.restarts = restarts;
    opt.seed = seed;

    Decoded init = moment_start(d);
    std::vector<double> steps;
    switch (model) {
    case GpdModel::M0:
        init.xi = std::max(init.xi, 0.01);
        steps = {0.1, 0.2};
        break;
    case GpdModel::M1:
        steps = {0.1, 0.3};
        break;
    default:
        // Start at the M1 optimum (beta1 = 0) so the fit nests M1.
        init = fit_point(d, GpdModel::M1, restarts, seed).p;
        steps = {0.1, 0.3, model == GpdModel::M2 ? 0.05 : 0.1};
        break;
    }
    const std::vector<double> start = encode(model, init, d);

    const Objective f = [&](std::span<const double> th) {
        return negative_loglik(model, decode(model, th, d), d);
    };
    if (!std::isfinite(f(start)))
        throw EstimationError("GPD fit: no feasible starting point");
    OptimResult r = minimize(f, start, steps, opt);
    if (model != GpdModel::M0) {
        // The likelihood can have a separate mode on the edge of the support
        // (xi < -1) that local searches from the interior miss.
        std::vector<double> on_edge{std::min(r.x[0], -1.2)};
        std::vector<double> edge_steps{steps[0]};
        if (model != GpdModel::M1) {
            on_edge.push_back(r.x[2]);
            edge_steps.push_back(steps[2]);
        }
        const auto lift = [&](std::span<const double> e) {
            std::vector<double> th{e[0], 0.0};
            if (e.size() > 1)
                th.push_back(e[1]);
            return th;
        };
        const Objective g = [&](std::span<const double> e) { return f(lift(e)); };
        if (std::isfinite(g(on_edge))) {
            SimplexOptions local = opt;
            local.restarts = 0;
            const OptimResult e = minimize(g, on_edge, edge_steps, local);
            OptimResult full = minimize(f, lift(e.x), steps, local);
            if (full.value < r.value)
                r = std::move(full);
        }
    }
    if (!std::isfinite(r.value))
        throw EstimationError("GPD fit: optimizer found no finite likelihood");
    return {decode(model, r.x, d), -r.value, r.converged};
}

Exceedances exceedances(std::span<const double> y, std::span<const double> t, double u)
{
    if (y.size() != t.size())
        throw DomainError("log sizes and times differ in length");
    Exceedances d;
    for (std::size_t i = 0; i < y.size(); ++i) {
        if (y[i] > u) {
            d.x.push_back(y[i] - u);
            d.t.push_back(t[i]);
        }
    }
    return d;
}

std::vector<double> parameter_vector(GpdModel model, const Decoded& p)
{
    if (model == GpdModel::M2 || model == GpdModel::M3)
        return {p.xi, p.beta0, p.beta1};
    return {p.xi, p.beta0};
}

} // namespace

// ---------------------------------------------------------------------------

std::string to_string(GpdModel m)
{
    switch (m) {
    case GpdModel::M0:
        return "M0";
    case GpdModel::M1:
        return "M1";
    case GpdModel::M2:
        return "M2";
    case GpdModel::M3:
        break;
    }
    return "M3";
}

std::optional<GpdModel> parse_gpd_model(std::string_view s)
{
    if (s == "M0")
        return GpdModel::M0;
    if (s == "M1")
        return GpdModel::M1;
    if (s == "M2")
        return GpdModel::M2;
    if (s == "M3")
        return GpdModel::M3;
    return std::nullopt;
}

double GpdFit::beta(double t) const
{
    return scale_at(model, beta0, beta1, t);
}

double GpdFit::endpoint(double t) const
{
    return gpd_endpoint(u, xi, beta(t));
}

int GpdFit::free_parameters() const
{
    return has_slope() ? 3 : 2;
}

GpdFit fit_pot(std::span<const double> log_sizes, std::span<const double> times, double u, GpdModel model,
               const FitOptions& options)
{
    const Exceedances d = exceedances(log_sizes, times, u);
    if (d.x.size() < kMinExceedances)
        throw EstimationError("too few exceedances above u = " + std::to_string(u) + ": " +
                              std::to_string(d.x.size()) + " (need " + std::to_string(kMinExceedances) + ")");

    const PointFit pf = fit_point(d, model, options.restarts, options.seed);

    GpdFit fit;
    fit.model = model;
    fit.u = u;
    fit.n_exceed = d.x.size();
    fit.xi = pf.p.xi;
    fit.beta0 = pf.p.beta0;
    fit.beta1 = pf.p.beta1;
    fit.loglik = pf.loglik;
    fit.converged = pf.converged;
    fit.seed = options.seed;

    if (options.n_boot == 0)
        return fit;

    const std::size_t n_params = fit.has_slope() ? 3 : 2;
    const Replicate replicate = [&](Rng& rng) -> std::optional<std::vector<double>> {
        Exceedances sim;
        sim.t = d.t;
        sim.x.reserve(d.x.size());
        for (double t : d.t)
            sim.x.push_back(gpd_sample({fit.xi, fit.beta(t), 0.0}, rng));
        try {
            const PointFit r = fit_point(sim, model, options.restarts, rng.bits());
            if (!r.converged)
                return std::nullopt;
            return parameter_vector(model, r.p);
        } catch (const EstimationError&) {
            return std::nullopt;
        }
    };
    const BootstrapResult boot =
        bootstrap_se(n_params, replicate, options.n_boot, derive_seed(options.seed, 0xB007), options.threads);
    fit.xi_se = boot.se[0];
    fit.beta0_se = boot.se[1];
    if (fit.has_slope()) {
        fit.beta1_se = boot.se[2];
        if (fit.beta1_se > 0.0)
            fit.beta1_p = two_sided_normal_p(fit.beta1 / fit.beta1_se);
    }
    fit.boot_ok = boot.n_ok;
    fit.boot_failed = boot.n_failed;
    return fit;
}

GpdFit fit_pot(const BreachCatalog& catalog, double u, GpdModel model, const FitOptions& options)
{
    return fit_pot(catalog.known_log_sizes(), catalog.known_times(), u, model, options);
}

EndpointCurve endpoint_curve(const GpdFit& fit, std::span<const double> times)
{
    if (!(fit.xi < 0.0))
        throw DomainError("endpoint undefined: xi >= 0 implies no finite maximum");
    EndpointCurve c;
    for (double t : times) {
        const double b = fit.beta(t);
        if (!(b > 0.0))
            throw DomainError("scale beta(t) is not positive at t = " + std::to_string(t));
        c.times.push_back(t);
        c.endpoints.push_back(fit.u - b / fit.xi);
    }
    if (fit.model == GpdModel::M3)
        c.growth_exponent = -fit.beta1 / fit.xi;
    return c;
}

StabilityScan stability_scan(std::span<const double> log_sizes, std::span<const double> times,
                             std::span<const double> u_grid, GpdModel model, const FitOptions& options)
{
    StabilityScan scan;
    double t_ref = 0.0;
    if (!u_grid.empty()) {
        const double u_min = *std::min_element(u_grid.begin(), u_grid.end());
        for (std::size_t i = 0; i < log_sizes.size(); ++i)
            if (log_sizes[i] > u_min)
                t_ref = std::max(t_ref, times[i]);
    }

    for (double u : u_grid) {
        StabilityEntry e;
        e.u = u;
        e.n_exceed = static_cast<std::size_t>(
            std::count_if(log_sizes.begin(), log_sizes.end(), [u](double y) { return y > u; }));
        try {
            e.fit = fit_pot(log_sizes, times, u, model, options);
            e.endpoint = e.fit->endpoint(t_ref);
        } catch (const Error& err) {
            e.error = err.what();
        }
        scan.entries.push_back(std::move(e));
    }

    const auto usable = [](const StabilityEntry& e) { return e.fit && std::isfinite(e.endpoint); };
    if (scan.entries.size() == 1 && scan.entries[0].fit) {
        scan.recommended_u = scan.entries[0].u;
    } else {
        for (std::size_t k = 0; k + 1 < scan.entries.size(); ++k) {
            const auto& a = scan.entries[k];
            const auto& b = scan.entries[k + 1];
            if (usable(a) && usable(b) && std::abs(b.endpoint - a.endpoint) < std::log(1.1)) {
                scan.recommended_u = a.u;
                break;
            }
        }
    }
    return scan;
}

StabilityScan stability_scan(const BreachCatalog& catalog, std::span<const double> u_grid, GpdModel model,
                             const FitOptions& options)
{
    return stability_scan(catalog.known_log_sizes(), catalog.known_times(), u_grid, model, options);
}

LrtResult lrt(const GpdFit& nested, const GpdFit& full)
{
    const bool ok = nested.model == GpdModel::M1 && (full.model == GpdModel::M2 || full.model == GpdModel::M3);
    if (!ok)
        throw DomainError("models " + to_string(nested.model) + " and " + to_string(full.model) + " are not nested");
    if (nested.u != full.u || nested.n_exceed != full.n_exceed)
        throw DomainError("nested fits must share threshold and data");
    return likelihood_ratio_test(nested.loglik, full.loglik, full.free_parameters() - nested.free_parameters());
}

} // namespace heavytail
