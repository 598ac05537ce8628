#include "commands.hpp"

#include "heavytail/error.hpp"
#include "heavytail/montecarlo.hpp"

#include <cmath>
#include <iostream>

namespace heavytail::cli {

namespace {

struct SimulateArgs {
    Common common;
    std::string preset;
    std::string model = "D0";
    std::optional<double> alpha0, alpha1, nu0, nu1, u_log;
    std::optional<double> rate;
    std::optional<double> rate_intercept, rate_slope;
    double horizon = 8.0;
    std::size_t rep = 0;
    std::string output;
};

void run_simulate(const SimulateArgs& a)
{
    SimSpec spec;
    if (a.preset == "paper-d0")
        spec.severity = PaperModels::d0();
    else if (a.preset == "paper-d1")
        spec.severity = PaperModels::d1();
    else if (a.preset == "paper-d2")
        spec.severity = PaperModels::d2();
    else {
        spec.severity.model = *parse_dte_model(a.model);
        spec.severity.u = std::log(a.common.threshold);
        if (!a.alpha0)
            throw CLI::ValidationError("--alpha0", "required without --preset");
        if (spec.severity.model != DteModel::D0Star && !a.nu0)
            throw CLI::ValidationError("--nu0", "required for models with a finite endpoint");
    }
    SeverityModel& s = spec.severity;
    if (a.alpha0)
        s.alpha0 = *a.alpha0;
    if (a.alpha1)
        s.alpha1 = *a.alpha1;
    if (a.nu0)
        s.nu0 = *a.nu0;
    if (a.nu1)
        s.nu1 = *a.nu1;
    if (a.u_log)
        s.u = *a.u_log;
    if (s.model == DteModel::D0Star)
        s.nu0 = kInf;
    if (s.model == DteModel::D0 || s.model == DteModel::D0Star)
        s.alpha1 = 0.0;
    if (s.model != DteModel::D2)
        s.nu1 = 0.0;

    if (a.rate_intercept || a.rate_slope) {
        if (a.rate)
            throw CLI::ValidationError("--rate", "give either --rate or --rate-intercept/--rate-slope");
        spec.rate = RateLine{a.rate_intercept.value_or(0.0), a.rate_slope.value_or(0.0)};
    } else {
        spec.rate = a.rate.value_or(a.preset.empty() ? 0.0 : PaperModels::rate_mean);
        if (!a.rate && a.preset.empty())
            throw CLI::ValidationError("--rate", "required without --preset");
    }
    if (!(a.horizon > 0.0))
        throw CLI::ValidationError("--horizon", "must be positive");
    spec.horizon = a.horizon;
    spec.epoch = a.common.epoch_date();
    spec.seed = a.common.seed;

    const BreachCatalog cat = simulate_catalog(spec, a.rep);
    if (a.output.empty() || a.output == "-") {
        write_catalog(std::cout, cat);
        std::cerr << "seed " << spec.seed << " rep " << a.rep << " events " << cat.size() << "\n";
    } else {
        write_catalog(a.output, cat);
        std::cout << "seed " << spec.seed << " rep " << a.rep << " events " << cat.size() << " -> " << a.output
                  << "\n";
    }
}

} // namespace

void register_simulate(CLI::App& root, std::vector<Command>& out)
{
    auto args = std::make_shared<SimulateArgs>();
    CLI::App* app = root.add_subcommand("simulate", "Write a synthetic catalog in the ingest schema");
    add_common(*app, args->common);
    app->add_option("--preset", args->preset, "Published severity fit with rate 75.5/yr")
        ->check(CLI::IsMember({"paper-d0", "paper-d1", "paper-d2"}));
    app->add_option("--model", args->model, "D0, D0STAR, D1 or D2")
        ->check(CLI::IsMember({"D0", "D0STAR", "D1", "D2"}))
        ->capture_default_str();
    app->add_option("--alpha0", args->alpha0, "Shape intercept");
    app->add_option("--alpha1", args->alpha1, "Shape slope per year");
    app->add_option("--nu0", args->nu0, "Endpoint, log ids");
    app->add_option("--nu1", args->nu1, "D2 endpoint slope on ln t");
    app->add_option("--u-log", args->u_log, "Lower truncation, log ids (default: ln threshold)");
    app->add_option("--rate", args->rate, "Events per year");
    app->add_option("--rate-intercept", args->rate_intercept, "Events per month at t = 0");
    app->add_option("--rate-slope", args->rate_slope, "Change in events per month per year");
    app->add_option("--horizon", args->horizon, "Years simulated from the epoch")->capture_default_str();
    app->add_option("--rep", args->rep, "Repetition index (engine seeded from seed and index)")
        ->capture_default_str();
    app->add_option("--output,-o", args->output, "Output CSV (default: stdout)");
    out.push_back({app, [args] {
                       args->common.apply_env();
                       run_simulate(*args);
                   }});
}

} // namespace heavytail::cli
