#include "heavytail/montecarlo.hpp"

#include "heavytail/error.hpp"

#include <cmath>
#include <sstream>

namespace heavytail {

std::string to_string(DteModel m)
{
    switch (m) {
    case DteModel::D0:
        return "D0";
    case DteModel::D0Star:
        return "D0STAR";
    case DteModel::D1:
        return "D1";
    case DteModel::D2:
        break;
    }
    return "D2";
}

std::optional<DteModel> parse_dte_model(std::string_view s)
{
    if (s == "D0")
        return DteModel::D0;
    if (s == "D0STAR" || s == "D0*" || s == "D0star")
        return DteModel::D0Star;
    if (s == "D1")
        return DteModel::D1;
    if (s == "D2")
        return DteModel::D2;
    return std::nullopt;
}

double SeverityModel::nu(double t) const
{
    if (model == DteModel::D0Star)
        return kInf;
    if (model == DteModel::D2)
        return nu0 + nu1 * std::log(t + kLogTimeShift);
    return nu0;
}

// ---------------------------------------------------------------------------

namespace {

void check_failures(std::size_t failed, std::size_t n_rep, double max_fraction, const char* what)
{
    if (n_rep > 0 && static_cast<double>(failed) > max_fraction * static_cast<double>(n_rep)) {
        std::ostringstream msg;
        msg << what << ": " << failed << " of " << n_rep << " repetitions failed to converge";
        throw EstimationError(msg.str());
    }
}

} // namespace

BootstrapResult bootstrap_se(std::size_t n_params, const Replicate& replicate, std::size_t n_rep,
                             std::uint64_t seed, unsigned threads, double max_failure_fraction)
{
    auto reps = run_replications(n_rep, seed, threads, [&](std::size_t, Rng& rng) { return replicate(rng); });

    BootstrapResult r;
    for (auto& est : reps) {
        if (!est || est->size() != n_params) {
            ++r.n_failed;
            continue;
        }
        r.estimates.push_back(std::move(*est));
    }
    r.n_ok = r.estimates.size();
    check_failures(r.n_failed, n_rep, max_failure_fraction, "bootstrap");

    r.mean.assign(n_params, 0.0);
    r.se.assign(n_params, 0.0);
    r.degenerate = r.n_ok < 2;
    if (r.n_ok == 0)
        return r;
    for (const auto& e : r.estimates)
        for (std::size_t j = 0; j < n_params; ++j)
            r.mean[j] += e[j] / static_cast<double>(r.n_ok);
    if (r.degenerate)
        return r;
    for (const auto& e : r.estimates)
        for (std::size_t j = 0; j < n_params; ++j)
            r.se[j] += (e[j] - r.mean[j]) * (e[j] - r.mean[j]);
    for (auto& s : r.se)
        s = std::sqrt(s / static_cast<double>(r.n_ok - 1));
    return r;
}

NullPValue null_pvalue(const std::function<std::optional<double>(Rng&)>& statistic, double observed,
                       std::size_t n_rep, std::uint64_t seed, unsigned threads, double max_failure_fraction)
{
    const auto reps = run_replications(n_rep, seed, threads, [&](std::size_t, Rng& rng) { return statistic(rng); });
    NullPValue r;
    for (const auto& s : reps) {
        if (!s || !std::isfinite(*s)) {
            ++r.n_failed;
            continue;
        }
        ++r.n_ok;
        if (std::abs(*s) >= std::abs(observed))
            ++r.n_extreme;
    }
    check_failures(r.n_failed, n_rep, max_failure_fraction, "null simulation");
    r.p_value = static_cast<double>(r.n_extreme + 1) / static_cast<double>(r.n_ok + 1);
    return r;
}

// ---------------------------------------------------------------------------

std::vector<double> simulate_event_times(const RateSpec& rate, double horizon, Rng& rng)
{
    if (!(horizon > 0.0))
        throw DomainError("simulation horizon must be positive");
    std::vector<double> times;
    if (const double* per_year = std::get_if<double>(&rate)) {
        if (*per_year < 0.0)
            throw DomainError("event rate must be non-negative");
        if (*per_year == 0.0)
            return times;
        for (double t = rng.exponential(*per_year); t < horizon; t += rng.exponential(*per_year))
            times.push_back(t);
        return times;
    }
    const RateLine& line = std::get<RateLine>(rate);
    const double peak = std::max(line.per_year(0.0), line.per_year(horizon));
    if (std::min(line.per_year(0.0), line.per_year(horizon)) < 0.0)
        throw DomainError("rate line is negative within the horizon");
    if (peak == 0.0)
        return times;
    for (double t = rng.exponential(peak); t < horizon; t += rng.exponential(peak))
        if (rng.uniform() * peak < line.per_year(t))
            times.push_back(t);
    return times;
}

std::vector<double> simulate_log_sizes(const SeverityModel& severity, std::span<const double> times, Rng& rng)
{
    std::vector<double> y;
    y.reserve(times.size());
    for (double t : times)
        y.push_back(dte_sample(severity.at(t), rng));
    return y;
}

BreachCatalog simulate_catalog(const SimSpec& spec, std::size_t rep)
{
    Rng rng(derive_seed(spec.seed, rep));
    const auto times = simulate_event_times(spec.rate, spec.horizon, rng);
    std::vector<BreachEvent> events;
    events.reserve(times.size());
    for (double t : times) {
        const DtpParams p = spec.severity.sizes_at(t);
        if (!(p.alpha > 0.0))
            throw DomainError("severity shape is not positive within the horizon");
        BreachEvent e;
        e.date = spec.epoch + std::chrono::days{static_cast<long>(std::floor(t * kDaysPerYear))};
        e.size = static_cast<std::uint64_t>(std::ceil(dtp_sample(p, rng)));
        events.push_back(std::move(e));
    }
    return BreachCatalog(std::move(events), spec.epoch);
}

std::vector<double> simulate_compound_years(const DtpParams& severity, double count_mean, double count_variance,
                                            std::size_t n_years, std::uint64_t seed)
{
    Rng rng(seed);
    std::vector<double> years(n_years, 0.0);
    for (auto& y : years) {
        const std::uint64_t n = rng.overdispersed_count(count_mean, count_variance);
        for (std::uint64_t k = 0; k < n; ++k)
            y += dtp_sample(severity, rng);
    }
    return years;
}

} // namespace heavytail
