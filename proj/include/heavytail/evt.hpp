#pragma once

// Peaks-over-threshold estimation of the generalized Pareto tail of log
// sizes, with the scale optionally growing in time:
//
//   M0  xi >= 0, beta(t) = beta0               (no finite endpoint)
//   M1  beta(t) = beta0                        (constant endpoint)
//   M2  beta(t) = beta0 + beta1 t              (endpoint linear in t)
//   M3  beta(t) = beta0 + beta1 ln(t + 1 day)  (endpoint logarithmic in t)
//
// The endpoint of the log size at time t is u - beta(t)/xi for xi < 0.

#include "heavytail/catalog.hpp"
#include "heavytail/stats.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace heavytail {

enum class GpdModel { M0, M1, M2, M3 };

std::string to_string(GpdModel m);
std::optional<GpdModel> parse_gpd_model(std::string_view s);

struct GpdFit {
    GpdModel model = GpdModel::M1;
    double u = 0.0; // threshold, log ids
    std::size_t n_exceed = 0;
    double xi = 0.0;
    double xi_se = 0.0;
    double beta0 = 0.0;
    double beta0_se = 0.0;
    double beta1 = 0.0; // zero for M0/M1
    double beta1_se = 0.0;
    std::optional<double> beta1_p; // two-sided Wald on the bootstrap se
    double loglik = 0.0;
    bool converged = false;
    std::size_t boot_ok = 0;
    std::size_t boot_failed = 0;
    std::uint64_t seed = 0;

    double beta(double t) const;
    double endpoint(double t) const; // log ids; +inf when xi >= 0
    int free_parameters() const;
    bool has_slope() const { return model == GpdModel::M2 || model == GpdModel::M3; }
};

struct FitOptions {
    std::size_t n_boot = 1000; // 0 skips standard errors
    std::uint64_t seed = 20070101;
    int restarts = 5;
    unsigned threads = 1;
};

// Fits the exceedances y - u of log sizes y > u observed at times t
// (years since the epoch). Needs at least 10 exceedances. Standard errors
// come from a parametric bootstrap that redraws sizes at the observed
// exceedance times.
GpdFit fit_pot(std::span<const double> log_sizes, std::span<const double> times, double u, GpdModel model,
               const FitOptions& options = {});
GpdFit fit_pot(const BreachCatalog& catalog, double u, GpdModel model, const FitOptions& options = {});

struct EndpointCurve {
    std::vector<double> times;
    std::vector<double> endpoints; // log ids
    // M3 only: exp(nu(t)) grows like t^(-beta1/xi).
    std::optional<double> growth_exponent;
};

// Throws DomainError when xi >= 0 (no finite endpoint) or when beta(t) is
// not positive at a requested time.
EndpointCurve endpoint_curve(const GpdFit& fit, std::span<const double> times);

struct StabilityEntry {
    double u = 0.0;
    std::size_t n_exceed = 0;
    std::optional<GpdFit> fit;
    double endpoint = 0.0; // at the last exceedance time of the lowest threshold
    std::string error;     // set when the fit failed
};

struct StabilityScan {
    std::vector<StabilityEntry> entries;
    // Smallest threshold whose endpoint differs from the next threshold's
    // by less than 10% on the size scale (|delta nu| < ln 1.1).
    std::optional<double> recommended_u;
};

StabilityScan stability_scan(std::span<const double> log_sizes, std::span<const double> times,
                             std::span<const double> u_grid, GpdModel model, const FitOptions& options = {});
StabilityScan stability_scan(const BreachCatalog& catalog, std::span<const double> u_grid, GpdModel model,
                             const FitOptions& options = {});

// Nested pairs: M1 within M2 and M3. Throws DomainError otherwise.
LrtResult lrt(const GpdFit& nested, const GpdFit& full);

} // namespace heavytail
