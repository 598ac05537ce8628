#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace heavytail {

using Date = std::chrono::sys_days;

inline constexpr double kDaysPerYear = 365.25;

// Accepts YYYY-MM-DD and MM/DD/YYYY.
std::optional<Date> parse_date(std::string_view text);
std::string format_date(Date d);
Date make_date(int year, unsigned month, unsigned day);
Date default_epoch(); // 2007-01-01

enum class Country { US, NonUS, Unspecified };

std::string to_string(Country c);
Country parse_country(std::string_view text);

struct BreachEvent {
    Date date;
    std::optional<std::uint64_t> size; // nullopt: UNKNOWN
    Country country = Country::Unspecified;
    std::optional<std::string> org_id;
    std::optional<std::string> sector;
    std::optional<double> mcap;

    bool operator==(const BreachEvent&) const = default;
};

// Inclusive date range.
struct DateWindow {
    Date first;
    Date last;

    bool contains(Date d) const { return first <= d && d <= last; }
};

// Events ordered by date (stable with respect to input order) together
// with the epoch that maps to t = 0. Time is measured in fractional years
// of 365.25 days.
class BreachCatalog {
public:
    BreachCatalog() = default;
    explicit BreachCatalog(std::vector<BreachEvent> events, Date epoch = default_epoch());

    const std::vector<BreachEvent>& events() const { return events_; }
    std::size_t size() const { return events_.size(); }
    bool empty() const { return events_.empty(); }
    Date epoch() const { return epoch_; }

    double years_since_epoch(Date d) const;

    // Times and natural-log sizes of events with known positive size, in
    // catalog order.
    std::vector<double> known_times() const;
    std::vector<double> known_log_sizes() const;

    bool operator==(const BreachCatalog&) const = default;

private:
    std::vector<BreachEvent> events_;
    Date epoch_ = default_epoch();
};

// Column-name mapping for CSV ingest. Empty optional columns are skipped.
struct CsvSchema {
    std::string date = "date";
    std::string size = "size";
    std::string country = "country";
    std::string org_id = "org_id";
    std::string sector = "sector";
    std::string mcap = "mcap";
    // Compared case-insensitively after trimming.
    std::vector<std::string> unknown_markers{"", "unknown"};
};

struct RowError {
    std::size_t line = 0; // 1-based line in the file, header is line 1
    std::string message;
};

struct ParseResult {
    BreachCatalog catalog;
    std::vector<RowError> rejected;
};

// Throws DataError for a missing file, a header lacking the date or size
// column, or when more than half of the data rows are rejected.
ParseResult parse_catalog(const std::filesystem::path& path, const CsvSchema& schema = {},
                          Date epoch = default_epoch());
ParseResult parse_catalog(std::istream& in, const CsvSchema& schema = {}, Date epoch = default_epoch());

// Writes the default schema, one row per event; UNKNOWN sizes as "unknown".
void write_catalog(std::ostream& out, const BreachCatalog& catalog);
void write_catalog(const std::filesystem::path& path, const BreachCatalog& catalog);

struct FilterResult {
    BreachCatalog catalog;
    std::size_t dropped_unknown = 0;
    std::size_t dropped_at_or_below = 0;
    std::size_t dropped_outside_window = 0;
    std::vector<std::string> warnings;
};

// Keeps events with known size strictly above `threshold` whose date lies
// in `window` (all dates when absent). Throws DomainError for a negative
// threshold or an inverted window.
FilterResult filter_exceedances(const BreachCatalog& catalog, double threshold,
                                std::optional<DateWindow> window = std::nullopt);

BreachCatalog filter_country(const BreachCatalog& catalog, Country country);

struct CategorySummary {
    std::size_t n_total = 0;
    std::size_t n_unknown = 0;
    std::size_t n_above_threshold = 0;
    std::uint64_t total_breach = 0;          // sum of known sizes
    std::uint64_t total_above_threshold = 0; // sum of sizes above threshold

    std::size_t n_known() const { return n_total - n_unknown; }
    double unknown_fraction() const;
};

struct CatalogSummary {
    double threshold = 0.0;
    CategorySummary us;
    CategorySummary non_us;
    CategorySummary all; // includes events without a country tag
};

CatalogSummary summarize(const BreachCatalog& catalog, double threshold);

} // namespace heavytail
