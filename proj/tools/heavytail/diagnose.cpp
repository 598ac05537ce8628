#include "commands.hpp"

#include "heavytail/error.hpp"
#include "heavytail/json.hpp"
#include "heavytail/severity.hpp"

#include <cmath>
#include <sstream>

namespace heavytail::cli {

namespace {

struct DiagnoseArgs {
    Common common;
    std::string catalog;
    std::string model = "D1";
    EndpointFlags endpoint;
    std::string tail_grid = "5e4,1e5,2e5,5e5,1e6,2e6,5e6";
};

void run_diagnose(const DiagnoseArgs& a)
{
    const BreachCatalog cat = load_exceedances(a.catalog, a.common);
    SeverityOptions o;
    o.n_boot = a.common.n_rep;
    o.n_null = 0;
    o.seed = a.common.seed;
    o.threads = a.common.threads;

    const DteModel model = *parse_dte_model(a.model);
    std::optional<EndpointLine> line;
    if (model == DteModel::D2)
        line = resolve_endpoint(a.endpoint, cat, a.common);
    const DtpFit fit = fit_dte(cat, a.common.threshold, model, line, o);

    const TransformedSample ts = stationarity_transform(cat, fit);
    const KsResult ks = ks_stationary(ts);
    const auto times = cat.known_times();
    SeverityOptions ro = o;
    ro.seed = derive_seed(a.common.seed, 0xD1A6);
    const DtpFit refit = fit_dte(ts.values, times, a.common.threshold, DteModel::D0, std::nullopt, ro);

    const auto grid = parse_grid(a.tail_grid);
    const auto log_sizes = cat.known_log_sizes();
    const auto scan = alpha_tail_scan(log_sizes, grid);

    nlohmann::json j = {{"fit", fit},
                        {"ks", ks},
                        {"reference", {{"alpha", ts.reference.alpha}, {"u", ts.reference.u}, {"nu", num(ts.reference.nu)}}},
                        {"transformed_fit", refit},
                        {"tail_scan", scan},
                        {"seed", a.common.seed}};
    if (line)
        j["endpoint"] = {{"nu0", line->nu0}, {"nu1", line->nu1}};

    std::ostringstream t;
    t << fmt("%s fit: alpha0=%.4f alpha1=%.4f nu0=%.4f\n", to_string(fit.model).c_str(), fit.alpha0, fit.alpha1,
             fit.nu0);
    t << fmt("stationarity transform: KS D=%.4f p=%.4f (n=%zu) against DTE(%.4f, %.4f, %.4f)\n", ks.statistic,
             ks.p_value, ks.n, ts.reference.alpha, ts.reference.u, ts.reference.nu);
    t << fmt("D0 refit of transformed sizes: alpha=%.4f (%.4f) nu=%.4f\n", refit.alpha0, refit.alpha0_se, refit.nu0);
    t << "tail scan\n";
    t << fmt("  %12s %6s %10s %10s %10s\n", "u", "n", "alpha", "se", "nu");
    for (const auto& e : scan) {
        if (e.error.empty())
            t << fmt("  %12.4g %6zu %10.4f %10.4f %10.4f\n", e.u, e.n, e.alpha, e.se, e.nu);
        else
            t << fmt("  %12.4g %6zu  %s\n", e.u, e.n, e.error.c_str());
    }

    std::ostringstream tcsv;
    tcsv << "t,log_size,transformed,nu_star\n";
    for (std::size_t k = 0; k < ts.values.size(); ++k)
        tcsv << fmt("%.6f,%.6f,%.6f,%.6f\n", times[k], log_sizes[k], ts.values[k], ts.nu_star[k]);
    write_output(a.common, "transformed.csv", tcsv.str());

    std::ostringstream scsv;
    scsv << "u,n,alpha,se,nu,error\n";
    for (const auto& e : scan) {
        if (e.error.empty())
            scsv << fmt("%.6g,%zu,%.6f,%.6f,%.6f,\n", e.u, e.n, e.alpha, e.se, e.nu);
        else
            scsv << fmt("%.6g,%zu,,,,\"%s\"\n", e.u, e.n, e.error.c_str());
    }
    write_output(a.common, "tail_scan.csv", scsv.str());
    emit(a.common, "diagnose.json", j, t.str());
}

} // namespace

void register_diagnose(CLI::App& root, std::vector<Command>& out)
{
    auto args = std::make_shared<DiagnoseArgs>();
    CLI::App* app = root.add_subcommand("diagnose", "Stationarity transform, KS test and tail-shape scan");
    add_common(*app, args->common);
    app->add_option("catalog", args->catalog, "Catalog CSV")->required();
    app->add_option("--model", args->model, "D0, D0STAR, D1 or D2")
        ->check(CLI::IsMember({"D0", "D0STAR", "D1", "D2"}))
        ->capture_default_str();
    app->add_option("--tail-grid", args->tail_grid, "Lower truncations for the tail scan, ids")
        ->capture_default_str();
    add_endpoint_flags(*app, args->endpoint);
    out.push_back({app, [args] {
                       args->common.apply_env();
                       run_diagnose(*args);
                   }});
}

} // namespace heavytail::cli
