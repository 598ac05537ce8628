#include "commands.hpp"

#include "heavytail/error.hpp"
#include "heavytail/json.hpp"
#include "heavytail/projection.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

namespace heavytail::cli {

namespace {

struct ProjectArgs {
    Common common;
    std::string preset;
    std::string fit_json;
    std::string model = "all";
    std::optional<double> rate;
    std::optional<double> rate_var;
    std::string anchor;
    int last_year = 2019;
    double within_year = 0.5;
    std::string catalog;
    std::size_t n_events = 619;
    bool scale_1e8 = false;
};

std::vector<SeverityModel> load_fit_models(const std::string& path)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    std::vector<nlohmann::json> fits;
    if (j.contains("fits"))
        for (const auto& f : j["fits"])
            fits.push_back(f);
    else if (j.contains("fit"))
        fits.push_back(j["fit"]);
    else
        throw DataError(path + ": no 'fit' or 'fits' object");

    std::vector<SeverityModel> out;
    try {
        for (const auto& f : fits) {
            SeverityModel m;
            const auto model = parse_dte_model(f.at("model").get<std::string>());
            if (!model)
                throw DataError(path + ": unknown model " + f.at("model").dump());
            m.model = *model;
            m.u = std::log(f.at("u").get<double>());
            m.alpha0 = f.at("alpha0").get<double>();
            if (f.contains("alpha1") && f["alpha1"].is_number())
                m.alpha1 = f["alpha1"].get<double>();
            m.nu0 = f.at("nu0").is_number() ? f["nu0"].get<double>() : kInf;
            if (f.contains("nu1") && f["nu1"].is_number())
                m.nu1 = f["nu1"].get<double>();
            out.push_back(m);
        }
    } catch (const nlohmann::json::exception& e) {
        throw DataError(path + ": " + e.what());
    }
    return out;
}

Anchor parse_anchor(const std::string& s)
{
    const auto sep = s.find(':');
    if (sep == std::string::npos)
        throw CLI::ValidationError("--anchor", "expected YEAR:TOTAL");
    try {
        return {std::stoi(s.substr(0, sep)), std::stod(s.substr(sep + 1))};
    } catch (const std::logic_error&) {
        throw CLI::ValidationError("--anchor", "expected YEAR:TOTAL");
    }
}

void run_project(const ProjectArgs& a)
{
    std::vector<SeverityModel> models;
    if (!a.fit_json.empty()) {
        models = load_fit_models(a.fit_json);
    } else {
        models = {PaperModels::d0(), PaperModels::d1(), PaperModels::d2()};
    }
    if (a.model != "all") {
        const DteModel want = *parse_dte_model(a.model);
        std::erase_if(models, [&](const SeverityModel& m) { return m.model != want; });
        if (models.empty())
            throw DataError("model " + a.model + " not available in the fit file");
    }
    std::erase_if(models, [](const SeverityModel& m) { return m.model == DteModel::D0Star; });

    const bool paper = a.fit_json.empty() || a.preset == "paper";
    const double rate = a.rate.value_or(paper ? PaperModels::rate_mean : 0.0);
    const double rate_var = a.rate_var.value_or(paper && !a.rate ? PaperModels::rate_var : rate);
    if (!a.rate && !paper)
        throw CLI::ValidationError("--rate", "required with --fit-json");
    const Anchor anchor = a.anchor.empty() ? Anchor{PaperModels::anchor_year, PaperModels::anchor_total}
                                           : parse_anchor(a.anchor);
    const Date epoch = a.common.epoch_date();
    const double unit = a.scale_1e8 ? 1e8 : 1.0;

    nlohmann::json j = {{"seed", a.common.seed}, {"rate_mean", rate}, {"rate_var", rate_var}};
    auto forecasts = nlohmann::json::array();
    auto crossovers = nlohmann::json::array();
    std::ostringstream t;
    std::ostringstream fcsv;
    fcsv << "model,year,t,severity_mean,severity_sd,annual_mean,annual_sd,cumulative_mean,cumulative_sd\n";

    for (const auto& m : models) {
        const Forecast f = forecast(m, rate, rate_var, anchor, a.last_year, epoch, a.within_year);
        forecasts.push_back(f);
        t << fmt("%s  rate %.2f/yr (var %.1f), anchor %d: %.4g%s\n", f.model.c_str(), rate, rate_var, anchor.year,
                 anchor.cumulative / unit, a.scale_1e8 ? "e8" : "");
        t << fmt("  %-6s %20s %20s %20s\n", "year", "E[X] (sd)", "annual (sd)", "cumulative (sd)");
        for (const auto& r : f.rows) {
            t << fmt("  %-6d %9.3g (%8.3g) %9.3g (%8.3g) %9.4g (%8.3g)\n", r.year, r.severity_mean / unit,
                     r.severity_sd / unit, r.annual_mean / unit, r.annual_sd / unit, r.cumulative_mean / unit,
                     r.cumulative_sd / unit);
            fcsv << fmt("%s,%d,%.6f,%.8g,%.8g,%.8g,%.8g,%.8g,%.8g\n", f.model.c_str(), r.year, r.t, r.severity_mean,
                        r.severity_sd, r.annual_mean, r.annual_sd, r.cumulative_mean, r.cumulative_sd);
        }
        const double t_ref = f.rows.front().t;
        const double nu = m.nu(t_ref);
        const double alpha = m.alpha(t_ref);
        if (std::isfinite(nu) && alpha > 0.0) {
            const double n_star = clt_crossover(std::exp(m.u), std::exp(nu), alpha);
            crossovers.push_back({{"model", f.model}, {"t", t_ref}, {"alpha", alpha}, {"nu", nu}, {"n_star", n_star}});
            t << fmt("  CLT crossover at t=%.2f: n* = %.2f\n", t_ref, n_star);
        }
    }
    j["forecasts"] = forecasts;
    j["crossover"] = crossovers;
    write_output(a.common, "forecast.csv", fcsv.str());

    if (rate > 0.0) {
        std::vector<double> observed;
        if (!a.catalog.empty()) {
            const BreachCatalog cat = load_exceedances(a.catalog, a.common);
            double sum = 0.0;
            for (const auto& e : cat.events())
                if (e.size)
                    observed.push_back(sum += static_cast<double>(*e.size));
        }
        const std::size_t n = std::max(a.n_events, observed.size());
        std::vector<std::vector<CumsumPoint>> curves;
        std::ostringstream ccsv;
        ccsv << "n,t,observed";
        for (const auto& m : models) {
            curves.push_back(expected_cumsum_curve(m, n, rate));
            ccsv << "," << to_string(m.model) << "_mean," << to_string(m.model) << "_sd";
        }
        ccsv << "\n";
        for (std::size_t k = 0; k < n; ++k) {
            ccsv << fmt("%zu,%.6f,", k + 1, static_cast<double>(k + 1) / rate);
            if (k < observed.size())
                ccsv << fmt("%.8g", observed[k]);
            for (const auto& c : curves)
                ccsv << fmt(",%.8g,%.8g", c[k].mean, c[k].sd);
            ccsv << "\n";
        }
        write_output(a.common, "cumsum_curve.csv", ccsv.str());
        if (!curves.empty())
            j["cumsum_final"] = [&] {
                auto arr = nlohmann::json::array();
                for (std::size_t i = 0; i < models.size(); ++i)
                    arr.push_back({{"model", to_string(models[i].model)},
                                   {"n", n},
                                   {"mean", curves[i].back().mean},
                                   {"sd", curves[i].back().sd}});
                return arr;
            }();

        std::ostringstream scsv;
        scsv << "n";
        for (const auto& m : models)
            scsv << "," << to_string(m.model);
        scsv << "\n";
        for (std::size_t k = 1; k <= n; ++k) {
            scsv << k;
            for (const auto& m : models)
                scsv << fmt(",%.8g", superlinear_reference(std::exp(m.u), m.alpha(static_cast<double>(k) / rate),
                                                           static_cast<double>(k)));
            scsv << "\n";
        }
        write_output(a.common, "superlinear.csv", scsv.str());
    }
    emit(a.common, "forecast.json", j, t.str());
}

} // namespace

void register_project(CLI::App& root, std::vector<Command>& out)
{
    auto args = std::make_shared<ProjectArgs>();
    CLI::App* app = root.add_subcommand("project", "Compound-process forecasts and expected cumulative sums");
    add_common(*app, args->common);
    app->add_option("--preset", args->preset, "Published severity fits and rates")->check(CLI::IsMember({"paper"}));
    app->add_option("--fit-json", args->fit_json, "severity_fit.json from 'fit severity'");
    app->add_option("--model", args->model, "D0, D1, D2 or all")
        ->check(CLI::IsMember({"D0", "D1", "D2", "all"}))
        ->capture_default_str();
    app->add_option("--rate", args->rate, "Events per year");
    app->add_option("--rate-var", args->rate_var, "Variance of the annual count (default: the rate)");
    app->add_option("--anchor", args->anchor, "YEAR:TOTAL observed cumulative size through YEAR");
    app->add_option("--last-year", args->last_year, "Last forecast year")->capture_default_str();
    app->add_option("--within-year", args->within_year, "Severity evaluated this far into each year")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();
    app->add_option("--catalog", args->catalog, "Observed catalog for the cumulative-sum curve");
    app->add_option("--n-events", args->n_events, "Length of the expected cumulative-sum curve")
        ->capture_default_str();
    app->add_flag("--scale-1e8", args->scale_1e8, "Print sizes in units of 1e8");
    out.push_back({app, [args] {
                       args->common.apply_env();
                       run_project(*args);
                   }});
}

} // namespace heavytail::cli
