#pragma once

#include <cstddef>
#include <functional>
#include <span>

namespace heavytail {

double chi_squared_survival(double x, double df);

// Two-sided p-value of a standard normal statistic.
double two_sided_normal_p(double z);

// Asymptotic Kolmogorov survival Q(lambda) = P(K > lambda).
double kolmogorov_survival(double lambda);

struct LrtResult {
    double statistic = 0.0; // 2 (ll_full - ll_nested)
    int df = 0;
    double p_value = 1.0;
};

// Plain chi-squared(df) reference; identical log-likelihoods give p = 1.
// Throws DomainError when df < 1 or ll_full < ll_nested - 1e-6.
LrtResult likelihood_ratio_test(double loglik_nested, double loglik_full, int df);

struct KsResult {
    double statistic = 0.0; // sup |F_empirical - F_model|
    double p_value = 1.0;
    std::size_t n = 0;
};

// Two-sided one-sample Kolmogorov-Smirnov test. The p-value is the
// asymptotic Kolmogorov law at (sqrt(n) + 0.12 + 0.11/sqrt(n)) D.
// Requires n >= 5 and a non-constant sample.
KsResult ks_test(std::span<const double> sample, const std::function<double(double)>& cdf);

} // namespace heavytail
