#pragma once

#include <cstdint>
#include <random>

namespace heavytail {

// Seedable pseudo-random source.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the C++
// standard. All variates are derived from raw 64-bit words by the methods
// below rather than by <random> distributions (whose algorithms are
// implementation-defined), so streams are bit-reproducible across platforms.
//
//   uniform()      53 high bits, centred: ((w >> 11) + 0.5) * 2^-53, in (0,1)
//   normal()       Box-Muller cosine branch, two uniforms per draw, no caching
//   exponential()  -log(uniform()) / rate
//   poisson()      sequential inversion, chunked so each chunk has mean <= 500
//   gamma()        Marsaglia-Tsang squeeze (shape < 1 via the U^(1/a) boost)
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t bits() { return engine_(); } // raw engine word
    double uniform();
    double normal();
    double exponential(double rate);
    std::uint64_t poisson(double mean);
    double gamma(double shape);

    // Count with the given mean and variance: Poisson when var <= mean,
    // otherwise a gamma-Poisson (negative binomial) mixture.
    std::uint64_t overdispersed_count(double mean, double variance);

private:
    std::mt19937_64 engine_;
};

// SplitMix64 finaliser applied to (master, stream); used to give each
// Monte Carlo repetition its own non-overlapping engine seed.
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream);

} // namespace heavytail
