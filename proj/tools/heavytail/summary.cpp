#include "commands.hpp"

#include "heavytail/firmsize.hpp"
#include "heavytail/json.hpp"

#include <sstream>

namespace heavytail::cli {

namespace {

struct SummaryArgs {
    Common common;
    std::string catalog;
    double span_years = 0.0;
};

void run_summary(const SummaryArgs& a)
{
    BreachCatalog cat = load_catalog(a.catalog, a.common);
    if (const auto w = a.common.window_range()) {
        std::vector<BreachEvent> kept;
        for (const auto& e : cat.events())
            if (w->contains(e.date))
                kept.push_back(e);
        cat = BreachCatalog(std::move(kept), cat.epoch());
    }
    const CatalogSummary s = summarize(cat, a.common.threshold);

    nlohmann::json j = {{"summary", s}, {"n_events", cat.size()}};

    double span = a.span_years;
    if (!(span > 0.0)) {
        if (const auto w = a.common.window_range())
            span = static_cast<double>((w->last - w->first).count() + 1) / kDaysPerYear;
        else if (!cat.empty())
            span = static_cast<double>((cat.events().back().date - cat.events().front().date).count() + 1) /
                   kDaysPerYear;
    }
    std::optional<SectorSummary> sectors;
    if (span > 0.0) {
        sectors = sector_summary(cat, span);
        if (sectors->entries.empty() && sectors->notes.empty())
            sectors.reset();
    }
    if (sectors) {
        j["sectors"] = *sectors;
        j["span_years"] = span;
    }

    std::ostringstream t;
    t << fmt("threshold %.6g ids\n\n", s.threshold);
    t << fmt("%-8s %8s %9s %8s %16s %16s %9s\n", "category", "n", "unknown", "n>thr", "total", "total>thr",
             "unknown%");
    const auto row = [&](const char* name, const CategorySummary& c) {
        t << fmt("%-8s %8zu %9zu %8zu %16llu %16llu %8.1f%%\n", name, c.n_total, c.n_unknown, c.n_above_threshold,
                 static_cast<unsigned long long>(c.total_breach),
                 static_cast<unsigned long long>(c.total_above_threshold), 100.0 * c.unknown_fraction());
    };
    row("US", s.us);
    row("NON_US", s.non_us);
    row("ALL", s.all);
    if (sectors) {
        t << fmt("\nsectors over %.2f years\n%-24s %6s %14s %12s\n", span, "sector", "n", "median size",
                 "per 10 yr");
        for (const auto& e : sectors->entries)
            t << fmt("%-24s %6zu %14.6g %12.2f\n", e.sector.c_str(), e.n, e.median_size, e.frequency_10y);
        for (const auto& n : sectors->notes)
            t << "note: " << n << "\n";
    }
    emit(a.common, "summary.json", j, t.str());
}

} // namespace

void register_summary(CLI::App& root, std::vector<Command>& out)
{
    auto args = std::make_shared<SummaryArgs>();
    CLI::App* app = root.add_subcommand("summary", "Counts and totals per category, sector medians");
    add_common(*app, args->common);
    app->add_option("catalog", args->catalog, "Catalog CSV")->required();
    app->add_option("--span-years", args->span_years, "Span used to scale sector counts to ten years");
    out.push_back({app, [args] {
                       args->common.apply_env();
                       run_summary(*args);
                   }});
}

} // namespace heavytail::cli
