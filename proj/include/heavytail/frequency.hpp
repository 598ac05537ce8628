#pragma once

// Event-rate statistics on calendar months and an identity-link Poisson
// regression of monthly counts on time.

#include "heavytail/catalog.hpp"

#include <optional>
#include <string>
#include <vector>

namespace heavytail {

struct MonthCount {
    int year = 0;
    unsigned month = 1; // 1..12
    int index = 0;      // months since the epoch's month (may be negative)
    std::size_t count = 0;

    double t() const { return index / 12.0; } // years since the epoch month
};

// One entry per calendar month lying entirely inside the window,
// zero-filled. Partial first and last months are left out, so events dated
// in them are not counted. Throws DomainError for an inverted window.
std::vector<MonthCount> monthly_counts(const BreachCatalog& catalog, const DateWindow& window);

struct YearCount {
    int year = 0;
    std::size_t count = 0;
};

// Calendar years covered by all twelve months of the series.
std::vector<YearCount> annual_counts(const std::vector<MonthCount>& months);

struct RateStats {
    std::size_t n_months = 0;
    std::size_t n_events = 0;
    double monthly_mean = 0.0;
    double monthly_sd = 0.0;
    std::size_t n_years = 0; // complete calendar years
    double annual_mean = 0.0;
    double annual_sd = 0.0;  // zero with fewer than two complete years
    double annual_var = 0.0;
};

RateStats rate_stats(const std::vector<MonthCount>& months);

// mu_m = intercept + slope * m/12, intercept in events/month at the epoch
// month, slope in events/month per year.
struct RateGlm {
    double intercept = 0.0;
    double intercept_se = 0.0;
    double slope = 0.0;
    double slope_se = 0.0;
    double slope_p = 1.0; // two-sided Wald
    double loglik = 0.0;
    bool converged = false;
    bool constrained = false; // fitted mean touches zero in the span
    int iterations = 0;
};

// Maximum likelihood with positivity of mu over the span enforced by a
// vanishing log barrier. Needs at least 24 months and a nonzero total;
// throws EstimationError otherwise or when Newton fails to converge.
RateGlm fit_rate_glm(const std::vector<MonthCount>& months);

struct RateModel {
    std::string category = "ALL"; // US, NON_US or ALL
    RateStats stats;
    std::optional<RateGlm> glm; // absent when the series is too short
    std::string glm_error;
};

// Statistics and GLM for one category (`country` nullopt: all events).
RateModel fit_rate(const BreachCatalog& catalog, const DateWindow& window,
                   std::optional<Country> country = std::nullopt);

} // namespace heavytail
