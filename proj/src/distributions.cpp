#include "heavytail/distributions.hpp"

#include "heavytail/error.hpp"

#include <boost/math/distributions/normal.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace heavytail {

namespace {

// Relative slack accepted when a point sits on a finite upper endpoint.
constexpr double kEndpointSlack = 1e-12;

// expm1(z L) / z with its limit L at z = 0.
double expm1_ratio(double z, double L)
{
    if (std::abs(z * L) < 1e-10)
        return L * (1.0 + 0.5 * z * L);
    return std::expm1(z * L) / z;
}

// 1 - exp(-alpha L), the normalizer of a truncated exponential on [0, L].
double truncation_mass(double alpha, double L)
{
    if (std::isinf(L))
        return 1.0;
    return -std::expm1(-alpha * L);
}

void check_dte(const DteParams& p)
{
    if (!(p.alpha > 0.0) || !(p.nu > p.u))
        throw DomainError("DTE parameters require alpha > 0 and u < nu");
}

void check_dtp(const DtpParams& p)
{
    if (!(p.alpha > 0.0) || !(p.u > 0.0) || !(p.nu > p.u))
        throw DomainError("DTP parameters require alpha > 0 and 0 < u < nu");
}

bool above_endpoint(double x, double end)
{
    return x > end + kEndpointSlack * std::max(1.0, std::abs(end));
}

} // namespace

// ---------------------------------------------------------------------------

double gpd_endpoint(double u, double xi, double beta_t)
{
    if (xi >= 0.0)
        return kInf;
    return u - beta_t / xi;
}

double gpd_cdf(double x, const GpdParams& p)
{
    if (!(p.beta > 0.0))
        throw DomainError("GPD scale must be positive");
    if (x < 0.0)
        throw DomainError("GPD exceedance must be non-negative");
    if (p.xi < 0.0 && above_endpoint(x, -p.beta / p.xi))
        throw DomainError("GPD exceedance above the finite endpoint");
    if (p.xi == 0.0)
        return -std::expm1(-x / p.beta);
    const double s = p.xi * x / p.beta;
    if (s <= -1.0)
        return 1.0;
    return -std::expm1(-std::log1p(s) / p.xi);
}

double gpd_log_pdf(double x, const GpdParams& p)
{
    if (!(p.beta > 0.0) || x < 0.0)
        return -kInf;
    if (p.xi == 0.0)
        return -std::log(p.beta) - x / p.beta;
    const double s = p.xi * x / p.beta;
    if (s <= -1.0)
        return -kInf;
    return -std::log(p.beta) - (1.0 / p.xi + 1.0) * std::log1p(s);
}

double gpd_quantile(double q, const GpdParams& p)
{
    if (!(q >= 0.0 && q <= 1.0))
        throw DomainError("probability outside [0, 1]");
    const double log_tail = std::log1p(-q);
    if (p.xi == 0.0)
        return -p.beta * log_tail;
    if (q == 1.0)
        return p.xi < 0.0 ? -p.beta / p.xi : kInf;
    return p.beta * std::expm1(-p.xi * log_tail) / p.xi;
}

double gpd_sample(const GpdParams& p, Rng& rng)
{
    return gpd_quantile(rng.uniform(), p);
}

// ---------------------------------------------------------------------------

DteParams to_log_domain(const DtpParams& p)
{
    return {p.alpha, std::log(p.u), std::isinf(p.nu) ? kInf : std::log(p.nu)};
}

DtpParams to_size_domain(const DteParams& p)
{
    return {p.alpha, std::exp(p.u), std::isinf(p.nu) ? kInf : std::exp(p.nu)};
}

double dte_cdf(double y, const DteParams& p)
{
    check_dte(p);
    if (y < p.u || above_endpoint(y, p.nu))
        throw DomainError("DTE argument outside (u, nu]: " + std::to_string(y));
    if (y >= p.nu)
        return 1.0;
    const double L = p.nu - p.u;
    return -std::expm1(-p.alpha * (y - p.u)) / truncation_mass(p.alpha, L);
}

double dte_log_pdf(double y, const DteParams& p)
{
    if (y <= p.u || y > p.nu)
        return -kInf;
    return std::log(p.alpha) - p.alpha * (y - p.u) - std::log(truncation_mass(p.alpha, p.nu - p.u));
}

double dte_quantile(double q, const DteParams& p)
{
    check_dte(p);
    if (!(q >= 0.0 && q <= 1.0))
        throw DomainError("probability outside [0, 1]");
    const double mass = truncation_mass(p.alpha, p.nu - p.u);
    const double s = -std::log1p(-q * mass) / p.alpha;
    return std::min(p.u + s, p.nu);
}

double dte_sample(const DteParams& p, Rng& rng)
{
    return dte_quantile(rng.uniform(), p);
}

double dtp_cdf(double x, const DtpParams& p)
{
    check_dtp(p);
    if (x < p.u || above_endpoint(x, p.nu))
        throw DomainError("DTP argument outside (u, nu]: " + std::to_string(x));
    return dte_cdf(std::min(std::log(x), std::log(p.nu)), to_log_domain(p));
}

double dtp_survival(double x, const DtpParams& p)
{
    check_dtp(p);
    if (x < p.u || above_endpoint(x, p.nu))
        throw DomainError("DTP argument outside (u, nu]: " + std::to_string(x));
    if (x >= p.nu)
        return 0.0;
    const double s = std::log(x / p.u);
    if (std::isinf(p.nu))
        return std::exp(-p.alpha * s);
    const double L = std::log(p.nu / p.u);
    return std::exp(-p.alpha * s) * -std::expm1(-p.alpha * (L - s)) / truncation_mass(p.alpha, L);
}

double dtp_quantile(double q, const DtpParams& p)
{
    check_dtp(p);
    const DteParams d = to_log_domain(p);
    const double y = dte_quantile(q, d);
    return std::min(p.u * std::exp(y - d.u), p.nu);
}

double dtp_sample(const DtpParams& p, Rng& rng)
{
    return dtp_quantile(rng.uniform(), p);
}

double DtpMoments::variance() const
{
    return std::max(0.0, second_moment - mean * mean);
}

double DtpMoments::sd() const
{
    return std::sqrt(variance());
}

DtpMoments dtp_moments(const DtpParams& p)
{
    check_dtp(p);
    const double a = p.alpha;
    if (std::isinf(p.nu)) {
        if (a <= 2.0)
            throw InfiniteMomentError("untruncated Pareto with alpha <= 2 has infinite second moment");
        return {p.u * a / (a - 1.0), p.u * p.u * a / (a - 2.0)};
    }
    const double L = std::log(p.nu / p.u);
    if (L == 0.0)
        return {p.u, p.u * p.u};
    // E[X^k] = u^k a (e^{(k-a)L} - 1)/(k-a) / (1 - e^{-aL}); at a = k the
    // ratio tends to L, which expm1_ratio supplies.
    const double mass = truncation_mass(a, L);
    return {p.u * a * expm1_ratio(1.0 - a, L) / mass,
            p.u * p.u * a * expm1_ratio(2.0 - a, L) / mass};
}

// ---------------------------------------------------------------------------

double normal_cdf(double z)
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_quantile(double q)
{
    if (!(q > 0.0 && q < 1.0)) {
        if (q == 0.0)
            return -kInf;
        if (q == 1.0)
            return kInf;
        throw DomainError("probability outside [0, 1]");
    }
    return boost::math::quantile(boost::math::normal_distribution<double>{}, q);
}

namespace {

struct StdBounds {
    double a;
    double b;
    double mass;
};

StdBounds standardized_bounds(const LognormParams& p)
{
    if (!(p.sigma > 0.0) || !(p.lower < p.upper) || p.lower < 0.0)
        throw DomainError("lognormal parameters require sigma > 0 and 0 <= lower < upper");
    const double a = p.lower > 0.0 ? (std::log(p.lower) - p.mu) / p.sigma : -kInf;
    const double b = std::isinf(p.upper) ? kInf : (std::log(p.upper) - p.mu) / p.sigma;
    // Use upper-tail probabilities when both bounds sit above the median.
    const double mass = a > 0.0 ? normal_cdf(-a) - normal_cdf(-b) : normal_cdf(b) - normal_cdf(a);
    return {a, b, mass};
}

} // namespace

double lognorm_trunc_cdf(double x, const LognormParams& p)
{
    const StdBounds s = standardized_bounds(p);
    if (x < p.lower || x > p.upper)
        throw DomainError("lognormal argument outside [lower, upper]");
    if (x <= 0.0)
        return 0.0;
    if (x >= p.upper)
        return 1.0;
    const double z = (std::log(x) - p.mu) / p.sigma;
    const double num = s.a > 0.0 ? normal_cdf(-s.a) - normal_cdf(-z) : normal_cdf(z) - normal_cdf(s.a);
    return std::clamp(num / s.mass, 0.0, 1.0);
}

double lognorm_trunc_log_density(double z, const LognormParams& p)
{
    const StdBounds s = standardized_bounds(p);
    const double w = (z - p.mu) / p.sigma;
    if (w < s.a || w > s.b)
        return 0.0;
    return std::exp(-0.5 * w * w) / (std::sqrt(2.0 * std::numbers::pi) * p.sigma * s.mass);
}

double lognorm_trunc_pdf(double x, const LognormParams& p)
{
    if (x < p.lower || x > p.upper)
        throw DomainError("lognormal argument outside [lower, upper]");
    if (x <= 0.0)
        return 0.0;
    return lognorm_trunc_log_density(std::log(x), p) / x;
}

double lognorm_trunc_sample(const LognormParams& p, Rng& rng)
{
    const StdBounds s = standardized_bounds(p);
    const double q = rng.uniform();
    double w = 0.0;
    if (s.a > 0.0) {
        // Invert through the upper tail for accuracy.
        const double tail = normal_cdf(-s.a) - q * s.mass;
        w = -normal_quantile(std::clamp(tail, 1e-300, 1.0));
    } else {
        const double lo = normal_cdf(s.a);
        w = normal_quantile(std::clamp(lo + q * s.mass, 1e-300, 1.0 - 1e-16));
    }
    w = std::clamp(w, s.a, s.b);
    return std::exp(p.mu + p.sigma * w);
}

} // namespace heavytail
