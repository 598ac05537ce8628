#pragma once

// Expected cumulative sums, the CLT crossover rule and compound-process
// forecasts of annual and cumulative totals.

#include "heavytail/catalog.hpp"
#include "heavytail/models.hpp"

#include <cstddef>
#include <string>
#include <vector>

namespace heavytail {

struct CumsumPoint {
    std::size_t n = 0; // event index, 1-based
    double t = 0.0;    // years, n / rate
    double mean = 0.0; // E[C_n], ids
    double sd = 0.0;   // independent events
};

// Running E[C_n] and sd for n = 1..n_events with event n at time
// t = n / rate_mean. Throws InfiniteMomentError for an infinite endpoint
// with alpha <= 2, DomainError for rate_mean <= 0.
std::vector<CumsumPoint> expected_cumsum_curve(const SeverityModel& severity, std::size_t n_events,
                                               double rate_mean);

// n* = (nu/u)^alpha, sizes in ids.
double clt_crossover(double u, double nu, double alpha);

// u n^(1/alpha): growth of the cumulative sum without a finite endpoint.
double superlinear_reference(double u, double alpha, double n);

struct Anchor {
    int year = 2014;
    double cumulative = 18.16e8; // ids observed through the end of `year`
};

struct ForecastRow {
    int year = 0;
    double t = 0.0;             // severity evaluation time, years since epoch
    double severity_mean = 0.0; // E[X_t]
    double severity_sd = 0.0;
    double annual_mean = 0.0;   // E[Y_t] = E[X] E[N]
    double annual_sd = 0.0;     // Var(Y) = E[N] Var(X) + E[X]^2 Var(N)
    double cumulative_mean = 0.0;
    double cumulative_sd = 0.0; // independent years
};

struct Forecast {
    std::string model;
    double rate_mean = 0.0; // events / year
    double rate_var = 0.0;
    Anchor anchor;
    double within_year = 0.5;
    std::vector<ForecastRow> rows;
};

// Forecasts calendar years anchor.year + 1 .. last_year. Severity for year
// Y is frozen at t = (Jan 1 of Y - epoch) + within_year. Throws DomainError
// for a year before the epoch, negative rates, or last_year <= anchor.year.
Forecast forecast(const SeverityModel& severity, double rate_mean, double rate_var, const Anchor& anchor,
                  int last_year, Date epoch = default_epoch(), double within_year = 0.5);

} // namespace heavytail
