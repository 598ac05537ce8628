#include "commands.hpp"

#include "heavytail/error.hpp"
#include "heavytail/evt.hpp"
#include "heavytail/firmsize.hpp"
#include "heavytail/frequency.hpp"
#include "heavytail/json.hpp"
#include "heavytail/severity.hpp"

#include <cmath>
#include <algorithm>
#include <sstream>

namespace heavytail::cli {

void add_endpoint_flags(CLI::App& app, EndpointFlags& e)
{
    app.add_option("--nu0", e.nu0, "D2 endpoint intercept, log ids");
    app.add_option("--nu1", e.nu1, "D2 endpoint slope on ln t");
    app.add_option("--u-log", e.u_log, "POT threshold (log ids) of the M3 fit converted to a D2 endpoint")
        ->capture_default_str();
}

EndpointLine resolve_endpoint(const EndpointFlags& e, const BreachCatalog& catalog, const Common& c)
{
    if (e.nu0 && e.nu1)
        return {*e.nu0, *e.nu1};
    if (e.nu0 || e.nu1)
        throw CLI::ValidationError("--nu0/--nu1", "give both or neither");
    FitOptions o;
    o.n_boot = 0;
    o.seed = c.seed;
    const GpdFit m3 = fit_pot(catalog, e.u_log, GpdModel::M3, o);
    return endpoint_from_m3(m3);
}

namespace {

// ---------------------------------------------------------------------------
// evt

struct EvtArgs {
    Common common;
    std::string catalog;
    std::string model = "M1";
    double u_log = 15.5;
    std::string u_grid = "14.4:16.8:0.2";
    std::size_t scan_n_rep = 0;
};

std::string gpd_text(const GpdFit& f)
{
    std::ostringstream t;
    t << fmt("%s  u=%.3f  n=%zu  ll=%.2f\n", to_string(f.model).c_str(), f.u, f.n_exceed, f.loglik);
    t << fmt("  xi     %10.4f (%.4f)\n", f.xi, f.xi_se);
    t << fmt("  beta0  %10.4f (%.4f)\n", f.beta0, f.beta0_se);
    if (f.has_slope())
        t << fmt("  beta1  %10.4f (%.4f)  p=%.3g\n", f.beta1, f.beta1_se, f.beta1_p.value_or(NAN));
    return t.str();
}

void run_evt(const EvtArgs& a)
{
    const BreachCatalog cat = load_exceedances(a.catalog, a.common);
    FitOptions o;
    o.n_boot = a.common.n_rep;
    o.seed = a.common.seed;
    o.threads = a.common.threads;
    const GpdModel model = *parse_gpd_model(a.model);
    const GpdFit fit = fit_pot(cat, a.u_log, model, o);

    FitOptions so = o;
    so.n_boot = a.scan_n_rep;
    const auto grid = parse_grid(a.u_grid);
    const StabilityScan scan = stability_scan(cat, grid, model, so);

    nlohmann::json j = {{"fit", fit}, {"stability_scan", scan}, {"seed", a.common.seed}};
    std::ostringstream t;
    t << gpd_text(fit);
    if (fit.xi < 0.0) {
        std::vector<double> times;
        const auto all_t = cat.known_times();
        const auto all_y = cat.known_log_sizes();
        for (std::size_t k = 0; k < all_t.size(); ++k)
            if (all_y[k] > a.u_log)
                times.push_back(all_t[k]);
        const auto [lo, hi] = std::minmax_element(times.begin(), times.end());
        t << fmt("  endpoint nu(t): %.3f at t=%.2f, %.3f at t=%.2f (exp: %.3g, %.3g)\n", fit.endpoint(*lo), *lo,
                 fit.endpoint(*hi), *hi, std::exp(fit.endpoint(*lo)), std::exp(fit.endpoint(*hi)));
        std::vector<double> ts;
        for (double x = *lo; x < *hi; x += 1.0 / 12.0)
            ts.push_back(x);
        ts.push_back(*hi);
        const EndpointCurve curve = endpoint_curve(fit, ts);
        if (curve.growth_exponent) {
            j["growth_exponent"] = *curve.growth_exponent;
            t << fmt("  growth exponent -beta1/xi = %.3f\n", *curve.growth_exponent);
        }
        std::ostringstream csv;
        csv << "t,nu,exp_nu\n";
        for (std::size_t k = 0; k < curve.times.size(); ++k)
            csv << fmt("%.6f,%.6f,%.6g\n", curve.times[k], curve.endpoints[k], std::exp(curve.endpoints[k]));
        write_output(a.common, "endpoint_curve.csv", csv.str());
    }
    t << fmt("stability scan (%zu thresholds), recommended u: %s\n", scan.entries.size(),
             scan.recommended_u ? fmt("%.3f", *scan.recommended_u).c_str() : "none");

    std::ostringstream csv;
    csv << "u,n_exceed,xi,beta0,beta1,endpoint,loglik,error\n";
    for (const auto& e : scan.entries) {
        if (e.fit)
            csv << fmt("%.6f,%zu,%.6f,%.6f,%.6f,%.6f,%.6f,\n", e.u, e.n_exceed, e.fit->xi, e.fit->beta0,
                       e.fit->beta1, e.endpoint, e.fit->loglik);
        else
            csv << fmt("%.6f,%zu,,,,,,\"%s\"\n", e.u, e.n_exceed, e.error.c_str());
    }
    write_output(a.common, "stability_scan.csv", csv.str());
    emit(a.common, "evt_fit.json", j, t.str());
}

// ---------------------------------------------------------------------------
// severity

struct SeverityArgs {
    Common common;
    std::string catalog;
    std::string model = "D0";
    EndpointFlags endpoint;
    std::optional<std::size_t> n_null;
};

std::string dtp_text(const DtpFit& f)
{
    std::ostringstream t;
    t << fmt("%s  u=%.6g  n=%zu  ll=%.2f%s\n", to_string(f.model).c_str(), f.u, f.n, f.loglik,
             f.constrained ? "  (constrained: alpha(t) at its bound)" : "");
    t << fmt("  alpha0 %10.4f (%.4f)\n", f.alpha0, f.alpha0_se);
    if (f.has_slope())
        t << fmt("  alpha1 %10.4f (%.4f)  p=%.3g\n", f.alpha1, f.alpha1_se, f.alpha1_p.value_or(NAN));
    if (std::isfinite(f.nu0))
        t << fmt("  nu0    %10.4f (%.4f)  exp=%.3g\n", f.nu0, f.nu0_se, std::exp(f.nu0));
    else
        t << "  nu0    inf\n";
    if (f.model == DteModel::D2)
        t << fmt("  nu1    %10.4f\n", f.nu1);
    return t.str();
}

void run_severity(const SeverityArgs& a)
{
    const BreachCatalog cat = load_exceedances(a.catalog, a.common);
    SeverityOptions o;
    o.n_boot = a.common.n_rep;
    o.n_null = a.n_null.value_or(a.common.n_rep);
    o.seed = a.common.seed;
    o.threads = a.common.threads;

    std::vector<DteModel> models;
    if (a.model == "all")
        models = {DteModel::D0Star, DteModel::D0, DteModel::D1, DteModel::D2};
    else
        models = {*parse_dte_model(a.model)};

    std::optional<EndpointLine> line;
    std::string line_error;
    for (DteModel m : models) {
        if (m != DteModel::D2)
            continue;
        if (models.size() == 1) {
            line = resolve_endpoint(a.endpoint, cat, a.common);
        } else {
            try {
                line = resolve_endpoint(a.endpoint, cat, a.common);
            } catch (const Error& e) {
                line_error = e.what();
            }
        }
    }

    std::vector<DtpFit> fits;
    nlohmann::json errors = nlohmann::json::object();
    for (DteModel m : models) {
        if (models.size() == 1) {
            fits.push_back(fit_dte(cat, a.common.threshold, m, m == DteModel::D2 ? line : std::nullopt, o));
            continue;
        }
        try {
            if (m == DteModel::D2 && !line)
                throw EstimationError("no D2 endpoint: " + line_error);
            fits.push_back(fit_dte(cat, a.common.threshold, m, m == DteModel::D2 ? line : std::nullopt, o));
        } catch (const Error& e) {
            errors[to_string(m)] = e.what();
        }
    }

    std::ostringstream t;
    nlohmann::json j;
    if (fits.size() == 1) {
        j = {{"fit", fits[0]}, {"seed", a.common.seed}};
        t << dtp_text(fits[0]);
    } else {
        j = {{"fits", fits}, {"seed", a.common.seed}};
        for (const auto& f : fits)
            t << dtp_text(f);
        auto tests = nlohmann::json::array();
        const auto compare = [&](std::size_t i, std::size_t k) {
            try {
                const LrtResult r = lrt(fits[i], fits[k]);
                tests.push_back({{"nested", to_string(fits[i].model)}, {"full", to_string(fits[k].model)}, {"lrt", r}});
                t << fmt("LRT %s vs %s: stat=%.3f df=%d p=%.3g\n", to_string(fits[i].model).c_str(),
                         to_string(fits[k].model).c_str(), r.statistic, r.df, r.p_value);
            } catch (const DomainError& e) {
                t << fmt("LRT %s vs %s: %s\n", to_string(fits[i].model).c_str(), to_string(fits[k].model).c_str(),
                         e.what());
            }
        };
        for (std::size_t i = 0; i + 1 < fits.size(); ++i)
            compare(i, i + 1);
        j["lrt"] = tests;
        if (!errors.empty()) {
            j["errors"] = errors;
            for (const auto& [k, v] : errors.items())
                t << k << ": " << v.get<std::string>() << "\n";
        }
        if (fits.empty())
            throw EstimationError("no severity model could be fitted");
    }
    if (line)
        j["endpoint"] = {{"nu0", line->nu0}, {"nu1", line->nu1}};
    emit(a.common, "severity_fit.json", j, t.str());
}

// ---------------------------------------------------------------------------
// frequency

struct FrequencyArgs {
    Common common;
    std::string catalog;
};

void run_frequency(const FrequencyArgs& a)
{
    const BreachCatalog cat = load_exceedances(a.catalog, a.common);
    DateWindow w;
    if (const auto win = a.common.window_range()) {
        w = *win;
    } else {
        if (cat.empty())
            throw DataError("no events above the threshold; give --window");
        w = {cat.events().front().date, cat.events().back().date};
    }

    std::vector<RateModel> models{fit_rate(cat, w, Country::US), fit_rate(cat, w, Country::NonUS), fit_rate(cat, w)};
    nlohmann::json j = {{"window", {{"first", format_date(w.first)}, {"last", format_date(w.last)}}},
                        {"threshold", a.common.threshold},
                        {"categories", models},
                        {"seed", a.common.seed}};

    std::ostringstream t;
    t << fmt("%-8s %5s %16s %16s %30s\n", "category", "n", "monthly", "annual", "GLM a (se); b (se), p");
    for (const auto& m : models) {
        std::string glm = m.glm ? fmt("%.2f (%.2f); %.2f (%.2f), %.2f", m.glm->intercept, m.glm->intercept_se,
                                      m.glm->slope, m.glm->slope_se, m.glm->slope_p)
                                : m.glm_error;
        t << fmt("%-8s %5zu %7.2f (%6.2f) %7.2f (%6.2f) %30s\n", m.category.c_str(), m.stats.n_events,
                 m.stats.monthly_mean, m.stats.monthly_sd, m.stats.annual_mean, m.stats.annual_sd, glm.c_str());
    }

    std::ostringstream csv;
    csv << "year,month,index,us,non_us,all\n";
    const auto us = monthly_counts(filter_country(cat, Country::US), w);
    const auto non = monthly_counts(filter_country(cat, Country::NonUS), w);
    const auto all = monthly_counts(cat, w);
    for (std::size_t k = 0; k < all.size(); ++k)
        csv << fmt("%d,%u,%d,%zu,%zu,%zu\n", all[k].year, all[k].month, all[k].index, us[k].count, non[k].count,
                   all[k].count);
    write_output(a.common, "monthly_counts.csv", csv.str());
    emit(a.common, "frequency_fit.json", j, t.str());
}

// ---------------------------------------------------------------------------
// firmsize

struct FirmsizeArgs {
    Common common;
    std::string sizes;
    std::string points;
    std::string taus = "0.3,0.5,0.9";
    double knot_usd = 1e10;
    bool no_knot = false;
    std::string range_usd = "1e8,1e11";
    double bin_decades = 1.0;
};

void run_firmsize(const FirmsizeArgs& a)
{
    const SizeSamples s = parse_size_samples(a.sizes);
    LognormOptions lo;
    lo.n_boot = a.common.n_rep;
    lo.seed = a.common.seed;
    lo.threads = a.common.threads;
    const LognormFit pop = fit_lognormal_trunc(s.population, lo);
    lo.seed = derive_seed(a.common.seed, 1);
    const LognormFit vic = fit_lognormal_trunc(s.victim, lo);

    const auto range = parse_grid(a.range_usd);
    if (range.size() != 2 || !(range[0] > 0.0) || !(range[1] > range[0]))
        throw CLI::ValidationError("--range-usd", "expected LO,HI in USD");
    const double x_lo = std::log(std::max(s.population.lower, s.victim.lower));
    const double x_hi = std::log(std::min(s.population.upper, s.victim.upper));
    std::vector<double> grid;
    for (double x = x_lo; x <= x_hi + 1e-12; x += (x_hi - x_lo) / 200.0)
        grid.push_back(std::min(x, x_hi));
    const auto curve = victimization_pdf(pop.params, vic.params, grid);
    const ScalingExponent se = local_scaling_exponent(pop, vic, grid, std::log(range[0]), std::log(range[1]),
                                                      std::min<std::size_t>(a.common.n_rep, 200),
                                                      derive_seed(a.common.seed, 2), a.common.threads);

    const double hist_lo = std::min(s.population.lower, s.victim.lower);
    const double hist_hi = std::max(s.population.upper, s.victim.upper);
    const auto hp = log_size_histogram(s.population.values, hist_lo, hist_hi, a.bin_decades);
    const auto hv = log_size_histogram(s.victim.values, hist_lo, hist_hi, a.bin_decades);
    const auto hist = victimization_pdf(hp, hv);

    nlohmann::json j = {{"population", pop}, {"victim", vic}, {"scaling", se}, {"seed", a.common.seed}};
    j["scaling"]["range_usd"] = range;
    std::ostringstream t;
    t << fmt("population  n=%zu  mu=%.3f (%.3f)  sigma=%.3f (%.3f)\n", pop.n, pop.params.mu, pop.mu_se,
             pop.params.sigma, pop.sigma_se);
    t << fmt("victim      n=%zu  mu=%.3f (%.3f)  sigma=%.3f (%.3f)\n", vic.n, vic.params.mu, vic.mu_se,
             vic.params.sigma, vic.sigma_se);
    t << fmt("victimization scaling exponent over [%.3g, %.3g] USD: %.3f (%.3f)\n", range[0], range[1], se.exponent,
             se.se);

    std::ostringstream csv;
    csv << "x,usd,relative_density,band_lower,band_upper\n";
    for (std::size_t k = 0; k < curve.size(); ++k)
        csv << fmt("%.6f,%.6g,%.6g,%.6g,%.6g\n", curve[k].x, std::exp(curve[k].x), curve[k].density, se.lower[k],
                   se.upper[k]);
    write_output(a.common, "victimization_pdf.csv", csv.str());
    std::ostringstream hcsv;
    hcsv << "x,usd,relative_density,excluded\n";
    for (const auto& p : hist)
        hcsv << fmt("%.6f,%.6g,%.6g,%d\n", p.x, std::exp(p.x), p.density, p.excluded ? 1 : 0);
    write_output(a.common, "victimization_histogram.csv", hcsv.str());

    if (!a.points.empty()) {
        std::vector<double> x, y;
        const ParseResult pr = parse_catalog(a.points, CsvSchema{}, a.common.epoch_date());
        for (const auto& e : pr.catalog.events()) {
            if (!e.mcap || !e.size || !(*e.mcap > 0.0) || *e.size == 0)
                continue;
            x.push_back(std::log(*e.mcap));
            y.push_back(std::log(static_cast<double>(*e.size)));
        }
        QuantileOptions qo;
        qo.n_boot = std::min<std::size_t>(a.common.n_rep, 500);
        qo.seed = a.common.seed;
        qo.threads = a.common.threads;
        const std::optional<double> knot = a.no_knot ? std::nullopt : std::optional<double>(std::log(a.knot_usd));
        auto qs = nlohmann::json::array();
        std::ostringstream qcsv;
        qcsv << "tau,intercept,slope,knot,slope_above\n";
        for (double tau : parse_grid(a.taus)) {
            const QuantileFit q = quantile_regression(x, y, tau, knot, qo);
            qs.push_back(q);
            t << fmt("quantile tau=%.2f  slope=%.3f (%.3f) p=%.3f", tau, q.slope, q.slope_se, q.slope_p);
            if (knot)
                t << fmt("  above knot %.3f (%.3f) p=%.3f", q.slope_above, q.slope_above_se, q.slope_above_p);
            t << "\n";
            qcsv << fmt("%.4f,%.6f,%.6f,%s,%.6f\n", tau, q.intercept, q.slope,
                        knot ? fmt("%.6f", *knot).c_str() : "", q.slope_above);
        }
        j["quantile_regression"] = qs;
        write_output(a.common, "quantile_lines.csv", qcsv.str());
    }
    emit(a.common, "firmsize_fit.json", j, t.str());
}

} // namespace

void register_fit(CLI::App& root, std::vector<Command>& out)
{
    CLI::App* fit = root.add_subcommand("fit", "Estimate tail, severity, rate or firm-size models");
    fit->require_subcommand(1);

    auto evt = std::make_shared<EvtArgs>();
    CLI::App* e = fit->add_subcommand("evt", "Peaks over threshold on log sizes (M0-M3)");
    add_common(*e, evt->common);
    e->add_option("catalog", evt->catalog, "Catalog CSV")->required();
    e->add_option("--model", evt->model, "M0, M1, M2 or M3")
        ->check(CLI::IsMember({"M0", "M1", "M2", "M3"}))
        ->capture_default_str();
    e->add_option("--u-log,--u", evt->u_log, "Threshold on log sizes")->capture_default_str();
    e->add_option("--u-grid", evt->u_grid, "Stability scan thresholds, lo:hi:step or a,b,c")->capture_default_str();
    e->add_option("--scan-n-rep", evt->scan_n_rep, "Bootstrap repetitions per scan threshold")->capture_default_str();
    out.push_back({e, [evt] {
                       evt->common.apply_env();
                       run_evt(*evt);
                   }});

    auto sev = std::make_shared<SeverityArgs>();
    CLI::App* s = fit->add_subcommand("severity", "Doubly truncated exponential severity (D0, D0STAR, D1, D2)");
    add_common(*s, sev->common);
    s->add_option("catalog", sev->catalog, "Catalog CSV")->required();
    s->add_option("--model", sev->model, "D0, D0STAR, D1, D2 or all")
        ->check(CLI::IsMember({"D0", "D0STAR", "D1", "D2", "all"}))
        ->capture_default_str();
    s->add_option("--n-null", sev->n_null, "Null simulations for the slope p-value (default: --n-rep)");
    add_endpoint_flags(*s, sev->endpoint);
    out.push_back({s, [sev] {
                       sev->common.apply_env();
                       run_severity(*sev);
                   }});

    auto freq = std::make_shared<FrequencyArgs>();
    CLI::App* f = fit->add_subcommand("frequency", "Monthly rates and identity-link Poisson GLM");
    add_common(*f, freq->common);
    f->add_option("catalog", freq->catalog, "Catalog CSV")->required();
    out.push_back({f, [freq] {
                       freq->common.apply_env();
                       run_frequency(*freq);
                   }});

    auto firm = std::make_shared<FirmsizeArgs>();
    CLI::App* m = fit->add_subcommand("firmsize", "Lognormal firm sizes, victimization scaling, quantile regression");
    add_common(*m, firm->common);
    m->add_option("sizes", firm->sizes, "CSV with mcap, role (population|victim)[, sector]")->required();
    m->add_option("--points", firm->points, "Catalog CSV with size and mcap for quantile regression");
    m->add_option("--tau", firm->taus, "Quantile levels, comma separated")->capture_default_str();
    m->add_option("--knot-usd", firm->knot_usd, "Changepoint of the quantile lines, USD")->capture_default_str();
    m->add_flag("--no-knot", firm->no_knot, "Plain linear quantile lines");
    m->add_option("--range-usd", firm->range_usd, "Scaling range LO,HI in USD")->capture_default_str();
    m->add_option("--bin-decades", firm->bin_decades, "Histogram bin width in decades")->capture_default_str();
    out.push_back({m, [firm] {
                       firm->common.apply_env();
                       run_firmsize(*firm);
                   }});
}

} // namespace heavytail::cli
