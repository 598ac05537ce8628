#include "common.hpp"

#include "heavytail/error.hpp"

#include <cstdarg>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

namespace heavytail::cli {

Date Common::epoch_date() const
{
    const auto d = parse_date(epoch);
    if (!d)
        throw CLI::ValidationError("--epoch", "unparseable date '" + epoch + "'");
    return *d;
}

std::optional<DateWindow> Common::window_range() const
{
    if (window.empty())
        return std::nullopt;
    const auto sep = window.find("..");
    if (sep == std::string::npos)
        throw CLI::ValidationError("--window", "expected FIRST..LAST");
    const auto a = parse_date(window.substr(0, sep));
    const auto b = parse_date(window.substr(sep + 2));
    if (!a || !b)
        throw CLI::ValidationError("--window", "unparseable date in '" + window + "'");
    return DateWindow{*a, *b};
}

void Common::apply_env()
{
    if (const char* s = std::getenv("HEAVYTAIL_SEED")) {
        try {
            seed = std::stoull(s);
        } catch (const std::exception&) {
            throw CLI::ValidationError("HEAVYTAIL_SEED", "not an unsigned integer");
        }
    }
}

void add_common(CLI::App& app, Common& c)
{
    app.add_option("--seed", c.seed, "Master random seed (HEAVYTAIL_SEED overrides)")->capture_default_str();
    app.add_option("--n-rep", c.n_rep, "Monte Carlo repetitions")->capture_default_str();
    app.add_option("--threads", c.threads, "Worker threads (0: all cores)")->capture_default_str();
    app.add_option("--out", c.out_dir, "Directory for JSON and plot-data CSV files");
    app.add_option("--format", c.format, "Stdout format")->check(CLI::IsMember({"text", "json"}))->capture_default_str();
    app.add_option("--epoch", c.epoch, "Date mapped to t = 0")->capture_default_str();
    app.add_option("--window", c.window, "Inclusive date window FIRST..LAST");
    app.add_option("--threshold", c.threshold, "Size threshold in ids")->check(CLI::PositiveNumber)->capture_default_str();
}

BreachCatalog load_catalog(const std::string& path, const Common& c)
{
    const ParseResult r = parse_catalog(path, CsvSchema{}, c.epoch_date());
    for (const auto& e : r.rejected)
        std::cerr << "warning: " << path << ":" << e.line << ": " << e.message << "\n";
    return r.catalog;
}

BreachCatalog load_exceedances(const std::string& path, const Common& c)
{
    const FilterResult f = filter_exceedances(load_catalog(path, c), c.threshold, c.window_range());
    for (const auto& w : f.warnings)
        std::cerr << "warning: " << w << "\n";
    return f.catalog;
}

std::string write_output(const Common& c, const std::string& name, const std::string& text)
{
    if (c.out_dir.empty())
        return {};
    std::error_code ec;
    std::filesystem::create_directories(c.out_dir, ec);
    const auto path = std::filesystem::path(c.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write " + path.string());
    out << text;
    if (!out)
        throw DataError("cannot write " + path.string());
    return path.string();
}

void emit(const Common& c, const std::string& json_name, const nlohmann::json& j, const std::string& text)
{
    write_output(c, json_name, j.dump(2) + "\n");
    if (c.format == "json")
        std::cout << j.dump(2) << "\n";
    else
        std::cout << text;
}

std::vector<double> parse_grid(const std::string& spec)
{
    std::vector<double> out;
    try {
        if (spec.find(':') != std::string::npos) {
            std::stringstream ss(spec);
            std::string a, b, s;
            std::getline(ss, a, ':');
            std::getline(ss, b, ':');
            std::getline(ss, s, ':');
            const double lo = std::stod(a), hi = std::stod(b), step = std::stod(s);
            if (!(step > 0.0) || hi < lo)
                throw CLI::ValidationError("grid", "expected lo:hi:step with step > 0");
            const auto n = static_cast<long>(std::floor((hi - lo) / step + 1e-9));
            for (long k = 0; k <= n; ++k)
                out.push_back(lo + static_cast<double>(k) * step);
        } else {
            std::stringstream ss(spec);
            std::string item;
            while (std::getline(ss, item, ','))
                out.push_back(std::stod(item));
        }
    } catch (const std::logic_error&) {
        throw CLI::ValidationError("grid", "cannot parse '" + spec + "'");
    }
    return out;
}

std::string fmt(const char* f, ...)
{
    char buf[512];
    va_list ap;
    va_start(ap, f);
    std::vsnprintf(buf, sizeof buf, f, ap);
    va_end(ap);
    return buf;
}

SeverityModel PaperModels::d0()
{
    SeverityModel m;
    m.model = DteModel::D0;
    m.u = std::log(5e4);
    m.alpha0 = 0.47;
    m.nu0 = 18.839;
    return m;
}

SeverityModel PaperModels::d1()
{
    SeverityModel m = d0();
    m.model = DteModel::D1;
    m.alpha0 = 0.58;
    m.alpha1 = -0.027;
    return m;
}

SeverityModel PaperModels::d2()
{
    // Endpoint converted from the M3 tail fit (u = 15.5, xi = -0.78,
    // beta0 = 1.60, beta1 = 0.65).
    SeverityModel m = d0();
    m.model = DteModel::D2;
    m.alpha0 = 0.57;
    m.alpha1 = -0.025;
    m.nu0 = 15.5 + 1.60 / 0.78;
    m.nu1 = 0.65 / 0.78;
    return m;
}

} // namespace heavytail::cli
