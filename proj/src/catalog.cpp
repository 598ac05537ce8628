#include "heavytail/catalog.hpp"

#include "heavytail/error.hpp"

#include "csv.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace heavytail {

namespace chr = std::chrono;

namespace {

using csv::lower;
using csv::split_csv;
using csv::trim;

std::string quote_csv(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"')
            q += '"';
        q += c;
    }
    return q + '"';
}

template <class T>
std::optional<T> parse_number(std::string_view s)
{
    T value{};
    const auto* end = s.data() + s.size();
    const auto [ptr, ec] = std::from_chars(s.data(), end, value);
    if (ec != std::errc{} || ptr != end)
        return std::nullopt;
    return value;
}

std::optional<std::uint64_t> parse_size(const std::string& s)
{
    if (auto v = parse_number<std::uint64_t>(s))
        return v;
    // Integral values written in floating-point notation, e.g. "5e4".
    const auto d = parse_number<double>(s);
    if (!d || *d < 0.0 || *d != std::floor(*d) || *d > 1.8e19)
        return std::nullopt;
    return static_cast<std::uint64_t>(*d);
}

} // namespace

// ---------------------------------------------------------------------------

Date make_date(int year, unsigned month, unsigned day)
{
    const chr::year_month_day ymd{chr::year{year}, chr::month{month}, chr::day{day}};
    if (!ymd.ok())
        throw DomainError("invalid calendar date");
    return Date{ymd};
}

Date default_epoch()
{
    return make_date(2007, 1, 1);
}

std::optional<Date> parse_date(std::string_view text)
{
    const std::string s = trim(text);
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    char trailing = 0;
    if (s.size() == 10 && s[4] == '-' && s[7] == '-') {
        if (std::sscanf(s.c_str(), "%4d-%2u-%2u%c", &y, &m, &d, &trailing) != 3)
            return std::nullopt;
    } else if (s.find('/') != std::string::npos) {
        if (std::sscanf(s.c_str(), "%2u/%2u/%4d%c", &m, &d, &y, &trailing) != 3 || s.size() < 8)
            return std::nullopt;
    } else {
        return std::nullopt;
    }
    const chr::year_month_day ymd{chr::year{y}, chr::month{m}, chr::day{d}};
    if (!ymd.ok())
        return std::nullopt;
    return Date{ymd};
}

std::string format_date(Date d)
{
    const chr::year_month_day ymd{d};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

std::string to_string(Country c)
{
    switch (c) {
    case Country::US:
        return "US";
    case Country::NonUS:
        return "NON_US";
    case Country::Unspecified:
        break;
    }
    return "UNSPECIFIED";
}

Country parse_country(std::string_view text)
{
    const std::string s = lower(trim(text));
    if (s.empty() || s == "unspecified" || s == "unknown")
        return Country::Unspecified;
    if (s == "us" || s == "usa" || s == "united states")
        return Country::US;
    return Country::NonUS;
}

// ---------------------------------------------------------------------------

BreachCatalog::BreachCatalog(std::vector<BreachEvent> events, Date epoch)
    : events_(std::move(events)), epoch_(epoch)
{
    std::stable_sort(events_.begin(), events_.end(),
                     [](const BreachEvent& a, const BreachEvent& b) { return a.date < b.date; });
}

double BreachCatalog::years_since_epoch(Date d) const
{
    return static_cast<double>((d - epoch_).count()) / kDaysPerYear;
}

std::vector<double> BreachCatalog::known_times() const
{
    std::vector<double> t;
    for (const auto& e : events_)
        if (e.size && *e.size > 0)
            t.push_back(years_since_epoch(e.date));
    return t;
}

std::vector<double> BreachCatalog::known_log_sizes() const
{
    std::vector<double> y;
    for (const auto& e : events_)
        if (e.size && *e.size > 0)
            y.push_back(std::log(static_cast<double>(*e.size)));
    return y;
}

// ---------------------------------------------------------------------------

ParseResult parse_catalog(std::istream& in, const CsvSchema& schema, Date epoch)
{
    std::string line;
    if (!std::getline(in, line))
        throw DataError("catalog has no header row");
    if (line.size() >= 3 && static_cast<unsigned char>(line[0]) == 0xEF)
        line.erase(0, 3); // UTF-8 byte order mark

    const auto header = split_csv(line);
    const auto column = [&](const std::string& name) -> std::optional<std::size_t> {
        if (name.empty())
            return std::nullopt;
        for (std::size_t i = 0; i < header.size(); ++i)
            if (lower(header[i]) == lower(name))
                return i;
        return std::nullopt;
    };
    const auto date_col = column(schema.date);
    const auto size_col = column(schema.size);
    if (!date_col || !size_col)
        throw DataError("malformed header: required columns '" + schema.date + "' and '" + schema.size +
                        "' not found");
    const auto country_col = column(schema.country);
    const auto org_col = column(schema.org_id);
    const auto sector_col = column(schema.sector);
    const auto mcap_col = column(schema.mcap);

    std::vector<std::string> markers;
    for (const auto& m : schema.unknown_markers)
        markers.push_back(lower(trim(m)));

    std::vector<BreachEvent> events;
    std::vector<RowError> rejected;
    std::size_t line_no = 1;
    std::size_t rows = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty())
            continue;
        ++rows;
        const auto fields = split_csv(line);
        const auto field = [&](std::optional<std::size_t> col) -> std::string {
            return col && *col < fields.size() ? fields[*col] : std::string{};
        };

        BreachEvent ev;
        const auto date = parse_date(field(date_col));
        if (!date) {
            rejected.push_back({line_no, "unparseable date '" + field(date_col) + "'"});
            continue;
        }
        ev.date = *date;

        const std::string size_text = field(size_col);
        if (std::find(markers.begin(), markers.end(), lower(size_text)) == markers.end()) {
            ev.size = parse_size(size_text);
            if (!ev.size) {
                rejected.push_back({line_no, "unparseable size '" + size_text + "'"});
                continue;
            }
        }

        ev.country = parse_country(field(country_col));
        if (auto s = field(org_col); !s.empty())
            ev.org_id = s;
        if (auto s = field(sector_col); !s.empty())
            ev.sector = s;
        if (auto s = field(mcap_col); !s.empty()) {
            const auto v = parse_number<double>(s);
            if (!v || !(*v > 0.0)) {
                rejected.push_back({line_no, "unparseable market capitalization '" + s + "'"});
                continue;
            }
            ev.mcap = v;
        }
        events.push_back(std::move(ev));
    }

    if (rows > 0 && 2 * rejected.size() > rows) {
        std::ostringstream msg;
        msg << rejected.size() << " of " << rows << " rows unparseable; first error at line "
            << rejected.front().line << ": " << rejected.front().message;
        throw DataError(msg.str());
    }
    return {BreachCatalog(std::move(events), epoch), std::move(rejected)};
}

ParseResult parse_catalog(const std::filesystem::path& path, const CsvSchema& schema, Date epoch)
{
    std::ifstream in(path);
    if (!in)
        throw DataError("cannot open catalog file: " + path.string());
    return parse_catalog(in, schema, epoch);
}

void write_catalog(std::ostream& out, const BreachCatalog& catalog)
{
    out << "date,size,country,org_id,sector,mcap\n";
    char buf[32];
    for (const auto& e : catalog.events()) {
        out << format_date(e.date) << ',';
        if (e.size)
            out << *e.size;
        else
            out << "unknown";
        out << ',' << to_string(e.country) << ',' << quote_csv(e.org_id.value_or("")) << ','
            << quote_csv(e.sector.value_or("")) << ',';
        if (e.mcap) {
            // Shortest representation that round-trips exactly.
            const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, *e.mcap);
            out.write(buf, end - buf);
        }
        out << '\n';
    }
}

void write_catalog(const std::filesystem::path& path, const BreachCatalog& catalog)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw DataError("cannot write catalog file: " + path.string());
    write_catalog(out, catalog);
    if (!out)
        throw DataError("write failed: " + path.string());
}

// ---------------------------------------------------------------------------

FilterResult filter_exceedances(const BreachCatalog& catalog, double threshold, std::optional<DateWindow> window)
{
    if (threshold < 0.0 || std::isnan(threshold))
        throw DomainError("threshold must be non-negative");
    if (window && window->first > window->last)
        throw DomainError("empty date window: " + format_date(window->first) + " after " +
                          format_date(window->last));

    FilterResult r;
    std::vector<BreachEvent> kept;
    std::uint64_t max_known = 0;
    bool any_known = false;
    for (const auto& e : catalog.events()) {
        if (window && !window->contains(e.date)) {
            ++r.dropped_outside_window;
            continue;
        }
        if (!e.size) {
            ++r.dropped_unknown;
            continue;
        }
        any_known = true;
        max_known = std::max(max_known, *e.size);
        if (static_cast<double>(*e.size) <= threshold) {
            ++r.dropped_at_or_below;
            continue;
        }
        kept.push_back(e);
    }
    if (any_known && threshold >= static_cast<double>(max_known))
        r.warnings.push_back("threshold is at or above the largest known size; no events retained");
    r.catalog = BreachCatalog(std::move(kept), catalog.epoch());
    return r;
}

BreachCatalog filter_country(const BreachCatalog& catalog, Country country)
{
    std::vector<BreachEvent> kept;
    for (const auto& e : catalog.events())
        if (e.country == country)
            kept.push_back(e);
    return BreachCatalog(std::move(kept), catalog.epoch());
}

double CategorySummary::unknown_fraction() const
{
    return n_total == 0 ? 0.0 : static_cast<double>(n_unknown) / static_cast<double>(n_total);
}

CatalogSummary summarize(const BreachCatalog& catalog, double threshold)
{
    CatalogSummary s;
    s.threshold = threshold;
    for (const auto& e : catalog.events()) {
        CategorySummary* buckets[2] = {&s.all, nullptr};
        if (e.country == Country::US)
            buckets[1] = &s.us;
        else if (e.country == Country::NonUS)
            buckets[1] = &s.non_us;
        for (CategorySummary* c : buckets) {
            if (!c)
                continue;
            ++c->n_total;
            if (!e.size) {
                ++c->n_unknown;
                continue;
            }
            c->total_breach += *e.size;
            if (static_cast<double>(*e.size) > threshold) {
                ++c->n_above_threshold;
                c->total_above_threshold += *e.size;
            }
        }
    }
    return s;
}

} // namespace heavytail
