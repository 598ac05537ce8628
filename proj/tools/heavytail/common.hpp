#pragma once

#include "heavytail/catalog.hpp"
#include "heavytail/models.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace heavytail::cli {

// Options shared by every subcommand.
struct Common {
    std::uint64_t seed = 20070101;
    std::size_t n_rep = 1000;
    unsigned threads = 1;
    std::string out_dir;    // empty: no files written
    std::string format = "text";
    std::string epoch = "2007-01-01";
    std::string window;     // FIRST..LAST
    double threshold = 5e4; // ids

    Date epoch_date() const;
    std::optional<DateWindow> window_range() const;
    // HEAVYTAIL_SEED, when set, replaces --seed.
    void apply_env();
};

void add_common(CLI::App& app, Common& c);

// Reads and filters a catalog to sizes above the threshold within the
// window. Prints parse warnings to stderr.
BreachCatalog load_exceedances(const std::string& path, const Common& c);
BreachCatalog load_catalog(const std::string& path, const Common& c);

// Writes `text` to out_dir/name (creating the directory) when out_dir is
// set; returns the path written or empty.
std::string write_output(const Common& c, const std::string& name, const std::string& text);

// JSON on stdout for --format json, `text` otherwise; JSON also goes to
// out_dir/json_name.
void emit(const Common& c, const std::string& json_name, const nlohmann::json& j, const std::string& text);

std::vector<double> parse_grid(const std::string& spec); // "a:b:step" or "a,b,c"

std::string fmt(const char* f, ...);

// Severity parameter sets of the published fits.
struct PaperModels {
    static SeverityModel d0();
    static SeverityModel d1();
    static SeverityModel d2();
    static constexpr double rate_mean = 75.5;
    static constexpr double rate_var = 229.0;
    static constexpr int anchor_year = 2014;
    static constexpr double anchor_total = 18.16e8;
};

} // namespace heavytail::cli
