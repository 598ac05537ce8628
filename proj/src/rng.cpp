#include "heavytail/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace heavytail {

double Rng::uniform()
{
    const std::uint64_t w = engine_();
    return (static_cast<double>(w >> 11) + 0.5) * 0x1.0p-53;
}

double Rng::normal()
{
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

double Rng::exponential(double rate)
{
    return -std::log(uniform()) / rate;
}

std::uint64_t Rng::poisson(double mean)
{
    if (!(mean > 0.0))
        return 0;
    constexpr double chunk = 500.0;
    std::uint64_t total = 0;
    while (mean > 0.0) {
        const double lambda = std::min(mean, chunk);
        mean -= lambda;
        // Inversion: walk the CDF from k = 0.
        double p = std::exp(-lambda);
        double cdf = p;
        const double target = uniform();
        std::uint64_t k = 0;
        while (target > cdf && p > 0.0) {
            ++k;
            p *= lambda / static_cast<double>(k);
            cdf += p;
        }
        total += k;
    }
    return total;
}

double Rng::gamma(double shape)
{
    if (shape < 1.0) {
        const double g = gamma(shape + 1.0);
        return g * std::pow(uniform(), 1.0 / shape);
    }
    const double d = shape - 1.0 / 3.0;
    const double c = 1.0 / std::sqrt(9.0 * d);
    for (;;) {
        double z = 0.0;
        double v = 0.0;
        do {
            z = normal();
            v = 1.0 + c * z;
        } while (v <= 0.0);
        v = v * v * v;
        const double u = uniform();
        if (u < 1.0 - 0.0331 * z * z * z * z)
            return d * v;
        if (std::log(u) < 0.5 * z * z + d * (1.0 - v + std::log(v)))
            return d * v;
    }
}

std::uint64_t Rng::overdispersed_count(double mean, double variance)
{
    if (!(mean > 0.0))
        return 0;
    if (variance <= mean)
        return poisson(mean);
    // Negative binomial as Poisson(Gamma(r, mean/r)) with r = mean^2/(var-mean).
    const double r = mean * mean / (variance - mean);
    return poisson(gamma(r) * mean / r);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream)
{
    std::uint64_t z = master + 0x9E3779B97F4A7C15ull * (stream + 1);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
    return z ^ (z >> 31);
}

} // namespace heavytail
