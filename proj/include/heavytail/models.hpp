#pragma once

// Time-varying parameterisations shared by estimation, simulation and
// projection.

#include "heavytail/distributions.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace heavytail {

// ln(t) terms are evaluated at t + one day so that t = 0 (the epoch) is
// finite.
inline constexpr double kLogTimeShift = 1.0 / 365.25;

enum class DteModel {
    D0,     // fixed endpoint, constant shape
    D0Star, // no finite endpoint, constant shape
    D1,     // fixed endpoint, shape linear in time
    D2,     // endpoint nu0 + nu1 ln t (supplied), shape linear in time
};

std::string to_string(DteModel m);
std::optional<DteModel> parse_dte_model(std::string_view s);

// Severity law of log sizes at time t: DTE(alpha(t), u, nu(t)).
struct SeverityModel {
    DteModel model = DteModel::D0;
    double u = 0.0; // lower truncation, log ids
    double alpha0 = 1.0;
    double alpha1 = 0.0;
    double nu0 = kInf;
    double nu1 = 0.0;

    double alpha(double t) const { return alpha0 + alpha1 * t; }
    double nu(double t) const;
    DteParams at(double t) const { return {alpha(t), u, nu(t)}; }
    DtpParams sizes_at(double t) const { return to_size_domain(at(t)); }
};

// Identity-link rate line: events per month a + b t, t in years.
struct RateLine {
    double intercept_per_month = 0.0;
    double slope_per_year = 0.0;

    double per_month(double t) const { return intercept_per_month + slope_per_year * t; }
    double per_year(double t) const { return 12.0 * per_month(t); }
};

} // namespace heavytail
