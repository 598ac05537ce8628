#include "heavytail/stats.hpp"

#include "heavytail/distributions.hpp"
#include "heavytail/error.hpp"

#include <boost/math/distributions/chi_squared.hpp>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace heavytail {

double chi_squared_survival(double x, double df)
{
    if (x <= 0.0)
        return 1.0;
    return boost::math::cdf(boost::math::complement(boost::math::chi_squared_distribution<double>(df), x));
}

double two_sided_normal_p(double z)
{
    return std::min(1.0, 2.0 * normal_cdf(-std::abs(z)));
}

double kolmogorov_survival(double lambda)
{
    if (lambda <= 0.0)
        return 1.0;
    constexpr double pi = std::numbers::pi;
    if (lambda < 1.18) {
        // Jacobi-transformed series, fast for small lambda.
        double sum = 0.0;
        for (int k = 1; k <= 20; ++k) {
            const double m = 2.0 * k - 1.0;
            sum += std::exp(-m * m * pi * pi / (8.0 * lambda * lambda));
        }
        return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * sum, 0.0, 1.0);
    }
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * lambda * lambda);
        sum += (k % 2 == 1 ? term : -term);
        if (term < 1e-18)
            break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

LrtResult likelihood_ratio_test(double loglik_nested, double loglik_full, int df)
{
    if (df < 1)
        throw DomainError("likelihood ratio test needs at least one degree of freedom");
    if (loglik_full < loglik_nested - 1e-6)
        throw DomainError("full model log-likelihood is below the nested model's");
    LrtResult r;
    r.df = df;
    r.statistic = std::max(0.0, 2.0 * (loglik_full - loglik_nested));
    r.p_value = chi_squared_survival(r.statistic, df);
    return r;
}

KsResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf)
{
    if (sample.size() < 5)
        throw DomainError("KS test needs at least 5 observations");
    std::vector<double> sorted(sample.begin(), sample.end());
    std::sort(sorted.begin(), sorted.end());
    if (sorted.front() == sorted.back())
        throw DomainError("KS test on a constant sample");

    const double n = static_cast<double>(sorted.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double f = cdf(sorted[i]);
        const double above = static_cast<double>(i + 1) / n - f;
        const double below = f - static_cast<double>(i) / n;
        d = std::max({d, above, below});
    }
    const double rn = std::sqrt(n);
    return {d, kolmogorov_survival((rn + 0.12 + 0.11 / rn) * d), sorted.size()};
}

} // namespace heavytail
