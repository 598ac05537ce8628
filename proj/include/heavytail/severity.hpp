#pragma once

// Maximum-likelihood fits of the doubly truncated exponential law of log
// sizes above a fixed lower truncation u, with shape and endpoint that may
// vary in time:
//
//   D0      alpha(t) = alpha0,               nu(t) = nu0
//   D0STAR  alpha(t) = alpha0,               nu(t) = inf
//   D1      alpha(t) = alpha0 + alpha1 t,    nu(t) = nu0
//   D2      alpha(t) = alpha0 + alpha1 t,    nu(t) = nu0 + nu1 ln(t + 1 day)
//
// For D0 and D1 the likelihood decreases in nu, so the constant endpoint
// estimate is the largest observed log size. D2 takes (nu0, nu1) as inputs,
// usually converted from an M3 tail fit.

#include "heavytail/catalog.hpp"
#include "heavytail/evt.hpp"
#include "heavytail/models.hpp"
#include "heavytail/stats.hpp"

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace heavytail {

inline constexpr double kDefaultLowerTruncation = 5e4; // ids

// Endpoint nu(t) = nu0 + nu1 ln(t + 1 day), log ids.
struct EndpointLine {
    double nu0 = 0.0;
    double nu1 = 0.0;
};

// nu0 = u - beta0/xi, nu1 = -beta1/xi. Requires an M3 fit with xi < 0.
EndpointLine endpoint_from_m3(const GpdFit& fit);

struct DtpFit {
    DteModel model = DteModel::D0;
    double u = kDefaultLowerTruncation; // ids
    std::size_t n = 0;
    double alpha0 = 0.0;
    double alpha0_se = 0.0;
    double alpha1 = 0.0;
    double alpha1_se = 0.0;
    std::optional<double> alpha1_p; // null-simulation p-value, D1/D2
    double nu0 = 0.0;               // log ids; +inf for D0STAR
    double nu0_se = 0.0;            // D0/D1 only
    double nu1 = 0.0;
    double loglik = 0.0;
    bool converged = false;
    bool constrained = false; // alpha(t) hit its positivity bound in the span
    double t_first = 0.0;     // observed span, years
    double t_last = 0.0;
    std::size_t boot_ok = 0;
    std::size_t boot_failed = 0;
    std::uint64_t seed = 0;

    SeverityModel severity() const;
    double alpha(double t) const { return alpha0 + alpha1 * t; }
    double nu(double t) const { return severity().nu(t); }
    bool has_slope() const { return model == DteModel::D1 || model == DteModel::D2; }
    // Parameters counted for likelihood-ratio tests: D0STAR 1, D0 2, D1 3,
    // D2 4 (the D2 endpoint counts as estimated upstream).
    int free_parameters() const;
};

struct SeverityOptions {
    std::size_t n_boot = 1000; // 0 skips standard errors
    std::size_t n_null = 1000; // 0 skips the slope p-value
    std::uint64_t seed = 20070101;
    int restarts = 0; // the log-likelihood is concave in the shape parameters
    unsigned threads = 1;
};

// Fits log sizes y (all strictly above ln u) observed at times t. Refuses
// n < 30. D2 needs `endpoint`, and every y_i must lie at or below nu(t_i).
DtpFit fit_dte(std::span<const double> log_sizes, std::span<const double> times, double u, DteModel model,
               std::optional<EndpointLine> endpoint = std::nullopt, const SeverityOptions& options = {});
DtpFit fit_dte(const BreachCatalog& catalog, double u, DteModel model,
               std::optional<EndpointLine> endpoint = std::nullopt, const SeverityOptions& options = {});

struct CurrentShape {
    double t = 0.0;
    double alpha = 0.0;
    double max_size = 0.0; // exp(nu(t)), ids; inf for D0STAR
};

// Throws DomainError when alpha(t) <= 0.
CurrentShape current_shape(const DtpFit& fit, double t);

struct TransformedSample {
    std::vector<double> values;  // log ids
    std::vector<double> nu_star; // transformed endpoint per observation
    DteParams reference;         // DTE(alpha0, ln u, median nu_star)
};

// Rescales the excess over ln u by alpha(t_i)/alpha0:
//   y~ = ln u + (y - ln u) alpha(t)/alpha0,
//   nu*(t) = ln u + (nu(t) - ln u) alpha(t)/alpha0,
// so that y~ ~ DTE(alpha0, ln u, nu*(t)) exactly when the fit holds.
TransformedSample stationarity_transform(std::span<const double> log_sizes, std::span<const double> times,
                                         const DtpFit& fit);
TransformedSample stationarity_transform(const BreachCatalog& catalog, const DtpFit& fit);

// KS test of a transformed sample against its reference law.
KsResult ks_stationary(const TransformedSample& sample);

struct TailScanEntry {
    double u = 0.0; // ids
    std::size_t n = 0;
    double alpha = 0.0;
    double se = 0.0; // inverse Fisher information
    double nu = 0.0; // log ids (sample maximum)
    std::string error;
};

// D0-style fit on the points above each lower truncation (ids). Each
// threshold needs at least 20 points; failures are reported per entry.
std::vector<TailScanEntry> alpha_tail_scan(std::span<const double> log_sizes, std::span<const double> u_grid);

// Nested pairs: D0STAR in D0 or D1, D0 in D1, D1 in D2.
LrtResult lrt(const DtpFit& nested, const DtpFit& full);

} // namespace heavytail
