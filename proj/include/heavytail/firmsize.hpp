#pragma once

// Organisation size and breach risk: truncated lognormal fits of
// population and victim market capitalisations, the victimization density
// ratio f_victim / f_population on log size, its local scaling exponent,
// linear quantile regression, and per-sector summaries.

#include "heavytail/catalog.hpp"
#include "heavytail/distributions.hpp"

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace heavytail {

enum class SizeRole { Population, Victim };

std::string to_string(SizeRole r);
std::optional<SizeRole> parse_size_role(std::string_view s);

struct SizeSample {
    SizeRole role = SizeRole::Population;
    std::vector<double> values; // USD, > 0
    double lower = 0.0;         // truncation bounds, USD
    double upper = kInf;
};

// Bounds set to the observed min and max.
SizeSample make_size_sample(std::vector<double> values, SizeRole role);

struct SizeSamples {
    SizeSample population;
    SizeSample victim;
    std::vector<std::string> sectors; // one per row, empty when absent
};

// CSV with columns mcap, role (population|victim) and optional sector.
// Throws DataError for a missing file, missing columns, or a non-positive
// or unparseable mcap.
SizeSamples parse_size_samples(const std::filesystem::path& path);
SizeSamples parse_size_samples(std::istream& in);

struct LognormFit {
    LognormParams params;
    double mu_se = 0.0;
    double sigma_se = 0.0;
    double loglik = 0.0;
    std::size_t n = 0;
    bool converged = false;
    std::size_t boot_ok = 0;
    std::size_t boot_failed = 0;
};

struct LognormOptions {
    std::size_t n_boot = 1000; // 0 skips standard errors
    std::uint64_t seed = 20070101;
    unsigned threads = 1;
};

// ML over (mu, sigma) with the sample's bounds held fixed. Needs n >= 30
// and at least two distinct values.
LognormFit fit_lognormal_trunc(const SizeSample& sample, const LognormOptions& options = {});

struct CurvePoint {
    double x = 0.0;       // log size (ln USD)
    double density = 0.0; // relative, unit maximum over the kept points
    bool excluded = false;  // histogram bin with no population mass
};

// Parametric ratio of the log-size densities on x_grid (ln USD). Every grid
// point must lie inside both supports.
std::vector<CurvePoint> victimization_pdf(const LognormParams& population, const LognormParams& victim,
                                          std::span<const double> x_grid);

struct LogHistogram {
    std::vector<double> edges;   // ln USD, ascending
    std::vector<double> density; // per unit ln size, integrates to one
};

// Bins of `decades` powers of ten on ln size, spanning [lo, hi] in USD.
LogHistogram log_size_histogram(std::span<const double> values, double lo, double hi, double decades = 1.0);

// Histogram ratio on the common bins (centres); throws DomainError when the
// edges differ. Empty population bins are excluded and flagged.
std::vector<CurvePoint> victimization_pdf(const LogHistogram& population, const LogHistogram& victim);

struct ScalingExponent {
    double exponent = 0.0;
    double se = 0.0;       // zero without resampling
    std::size_t n_points = 0;
    // Resampling bands on the kept curve points, same order as the curve.
    std::vector<double> x;
    std::vector<double> lower; // 5% quantile of resampled ln density
    std::vector<double> upper; // 95%
};

// Least-squares slope of ln density on x over [lo, hi] (ln USD). Needs at
// least five non-excluded points in the range.
ScalingExponent local_scaling_exponent(std::span<const CurvePoint> curve, double lo, double hi);

// Adds a standard error and pointwise bands by redrawing both samples at
// their sizes from the fitted laws, refitting, and recomputing the curve.
ScalingExponent local_scaling_exponent(const LognormFit& population, const LognormFit& victim,
                                       std::span<const double> x_grid, double lo, double hi,
                                       std::size_t n_rep = 200, std::uint64_t seed = 20070101,
                                       unsigned threads = 1);

struct QuantileFit {
    double tau = 0.5;
    std::size_t n = 0;
    double intercept = 0.0;
    double intercept_se = 0.0;
    double slope = 0.0; // below the knot when one is set
    double slope_se = 0.0;
    double slope_p = 1.0;
    std::optional<double> knot;
    double slope_above = 0.0; // slope + change at the knot
    double slope_above_se = 0.0;
    double slope_above_p = 1.0;
    double loss = 0.0; // sum of check losses
    std::size_t boot_ok = 0;
};

struct QuantileOptions {
    std::size_t n_boot = 500; // pairs resampling; 0 skips
    std::uint64_t seed = 20070101;
    unsigned threads = 1;
};

// Minimises sum rho_tau(y - a - b x [- c (x - knot)+]). Needs n >= 20, tau in
// (0, 1) and a design of full rank.
QuantileFit quantile_regression(std::span<const double> x, std::span<const double> y, double tau,
                                std::optional<double> knot = std::nullopt, const QuantileOptions& options = {});

// Check loss of a line (with optional knot term) on the data.
double check_loss(std::span<const double> x, std::span<const double> y, double tau, double a, double b,
                  std::optional<double> knot = std::nullopt, double c = 0.0);

struct SectorEntry {
    std::string sector;
    std::size_t n = 0;
    double median_size = 0.0;
    double frequency_10y = 0.0;
};

struct SectorSummary {
    std::vector<SectorEntry> entries; // sorted by sector name
    std::vector<std::string> notes;
};

// Median known size and event count scaled to ten years over a span of
// `span_years`. Events without a sector tag are ignored.
SectorSummary sector_summary(const BreachCatalog& catalog, double span_years);

} // namespace heavytail
