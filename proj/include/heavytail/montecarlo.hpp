#pragma once

// Simulation engine: synthetic catalogs, parametric bootstrap standard
// errors and null-simulation p-values.
//
// Every repetition i runs on its own engine seeded with
// derive_seed(master_seed, i). Results are collected by repetition index,
// so the outcome does not depend on the number of threads or the order in
// which repetitions finish.

#include "heavytail/catalog.hpp"
#include "heavytail/models.hpp"
#include "heavytail/rng.hpp"

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <functional>
#include <optional>
#include <thread>
#include <variant>
#include <vector>

namespace heavytail {

// Runs fn(i, rng) for i in [0, n_rep) and returns the results by index.
// `threads` == 0 selects std::thread::hardware_concurrency().
template <class Fn>
auto run_replications(std::size_t n_rep, std::uint64_t seed, unsigned threads, Fn fn)
    -> std::vector<decltype(fn(std::size_t{}, std::declval<Rng&>()))>
{
    using Result = decltype(fn(std::size_t{}, std::declval<Rng&>()));
    std::vector<Result> out(n_rep);
    if (threads == 0)
        threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n_rep, 1)));

    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t i = next++; i < n_rep; i = next++) {
            Rng rng(derive_seed(seed, i));
            out[i] = fn(i, rng);
        }
    };
    if (threads <= 1) {
        worker();
        return out;
    }
    std::vector<std::jthread> pool;
    for (unsigned k = 0; k < threads; ++k)
        pool.emplace_back(worker);
    pool.clear();
    return out;
}

struct BootstrapResult {
    std::vector<double> se;   // per-parameter standard deviation of estimates
    std::vector<double> mean; // per-parameter mean of estimates
    std::vector<std::vector<double>> estimates; // successful reps, by index
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
    bool degenerate = false; // fewer than two successful reps; se are zero
};

// One repetition: simulate from the fitted model and refit; nullopt marks a
// failed refit.
using Replicate = std::function<std::optional<std::vector<double>>(Rng&)>;

// Throws EstimationError when more than `max_failure_fraction` of the
// repetitions fail.
BootstrapResult bootstrap_se(std::size_t n_params, const Replicate& replicate, std::size_t n_rep,
                             std::uint64_t seed, unsigned threads = 1, double max_failure_fraction = 0.1);

struct NullPValue {
    double p_value = 1.0;
    std::size_t n_ok = 0;
    std::size_t n_failed = 0;
    std::size_t n_extreme = 0; // reps with |statistic| >= |observed|
};

// Fraction of null-simulated |statistic| at least |observed|, smoothed as
// (k + 1) / (n_ok + 1).
NullPValue null_pvalue(const std::function<std::optional<double>(Rng&)>& statistic, double observed,
                       std::size_t n_rep, std::uint64_t seed, unsigned threads = 1,
                       double max_failure_fraction = 0.1);

// Constant events per year, or an identity-link monthly rate line.
using RateSpec = std::variant<double, RateLine>;

struct SimSpec {
    RateSpec rate = 0.0;
    SeverityModel severity;
    double horizon = 1.0; // years
    Date epoch = default_epoch();
    std::uint64_t seed = 0;
    std::size_t n_rep = 1000;
};

// Event times on [0, horizon): exponential gaps for a constant rate,
// thinning against the maximum of the rate line otherwise.
std::vector<double> simulate_event_times(const RateSpec& rate, double horizon, Rng& rng);

// Catalog number `rep` of the spec (engine seeded with
// derive_seed(spec.seed, rep)). Dates are epoch + floor(365.25 t) days,
// sizes are ceil of a DTP draw at the event time.
BreachCatalog simulate_catalog(const SimSpec& spec, std::size_t rep = 0);

// Log sizes drawn from the severity model at the given times.
std::vector<double> simulate_log_sizes(const SeverityModel& severity, std::span<const double> times, Rng& rng);

// Annual compound sums Y = X_1 + ... + X_N, N with the given mean and
// variance (Poisson or negative binomial), X iid DTP.
std::vector<double> simulate_compound_years(const DtpParams& severity, double count_mean, double count_variance,
                                            std::size_t n_years, std::uint64_t seed);

} // namespace heavytail
