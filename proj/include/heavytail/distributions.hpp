#pragma once

// Density, CDF, quantile, sampler and moment kernels for the four families
// used by the estimators: the generalized Pareto (GPD), the doubly truncated
// Pareto (DTP) on raw sizes, its log-domain twin the doubly truncated
// exponential (DTE), and the doubly truncated lognormal.
//
// Heavy-tail arithmetic is done in log space: x^(-a) is evaluated as
// exp(-a ln x), and differences of such powers through expm1/log1p.

#include "heavytail/rng.hpp"

#include <limits>

namespace heavytail {

inline constexpr double kInf = std::numeric_limits<double>::infinity();

// ---------------------------------------------------------------------------
// Generalized Pareto on exceedances x = y - u >= 0.
//
// Sign convention: F(x) = 1 - (1 + xi x / beta)^(-1/xi), exponential limit
// at xi = 0. For xi < 0 the support is [0, -beta/xi] and the upper endpoint
// of y is u - beta/xi.
struct GpdParams {
    double xi = 0.0;
    double beta = 1.0;
    double u = 0.0;
};

double gpd_cdf(double x, const GpdParams& p);
double gpd_log_pdf(double x, const GpdParams& p);
double gpd_quantile(double q, const GpdParams& p);
double gpd_sample(const GpdParams& p, Rng& rng);

// Upper endpoint u - beta_t/xi of the level y; +inf when xi >= 0.
double gpd_endpoint(double u, double xi, double beta_t);

// ---------------------------------------------------------------------------
// Doubly truncated Pareto on sizes in (u, nu]; nu may be +inf.
struct DtpParams {
    double alpha = 1.0;
    double u = 1.0;
    double nu = kInf;
};

double dtp_cdf(double x, const DtpParams& p);
double dtp_survival(double x, const DtpParams& p);
double dtp_quantile(double q, const DtpParams& p);
double dtp_sample(const DtpParams& p, Rng& rng);

struct DtpMoments {
    double mean = 0.0;
    double second_moment = 0.0;

    double variance() const;
    double sd() const;
};

// First two raw moments. alpha = 1 and alpha = 2 use the analytic log
// limits. Throws InfiniteMomentError when nu = inf and alpha <= 2.
DtpMoments dtp_moments(const DtpParams& p);

// ---------------------------------------------------------------------------
// Doubly truncated exponential on log sizes y in (u, nu]: the law of ln X
// for X ~ DTP(alpha, e^u, e^nu).
struct DteParams {
    double alpha = 1.0;
    double u = 0.0;
    double nu = kInf;
};

double dte_cdf(double y, const DteParams& p);
double dte_log_pdf(double y, const DteParams& p);
double dte_quantile(double q, const DteParams& p);
double dte_sample(const DteParams& p, Rng& rng);

DteParams to_log_domain(const DtpParams& p);
DtpParams to_size_domain(const DteParams& p);

// ---------------------------------------------------------------------------
// Lognormal truncated to [lower, upper] (sizes; upper may be +inf, lower 0).
struct LognormParams {
    double mu = 0.0;
    double sigma = 1.0;
    double lower = 0.0;
    double upper = kInf;
};

double lognorm_trunc_cdf(double x, const LognormParams& p);
double lognorm_trunc_pdf(double x, const LognormParams& p);
// Density of z = ln x under the truncated law.
double lognorm_trunc_log_density(double z, const LognormParams& p);
double lognorm_trunc_sample(const LognormParams& p, Rng& rng);

double normal_cdf(double z);
double normal_quantile(double q);

} // namespace heavytail
