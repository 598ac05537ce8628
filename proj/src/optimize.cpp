#include "heavytail/optimize.hpp"

#include "heavytail/rng.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace heavytail {

namespace {

double evaluate(const Objective& f, std::span<const double> x, int& count)
{
    ++count;
    const double v = f(x);
    return std::isnan(v) ? std::numeric_limits<double>::infinity() : v;
}

double diameter(const std::vector<std::vector<double>>& simplex, std::size_t best)
{
    double d = 0.0;
    for (const auto& v : simplex) {
        double s = 0.0;
        for (std::size_t j = 0; j < v.size(); ++j)
            s = std::max(s, std::abs(v[j] - simplex[best][j]));
        d = std::max(d, s);
    }
    return d;
}

} // namespace

OptimResult nelder_mead(const Objective& f, std::vector<double> start,
                        std::span<const double> steps, const SimplexOptions& options)
{
    const std::size_t n = start.size();
    int count = 0;
    std::vector<std::vector<double>> simplex(n + 1, start);
    std::vector<double> values(n + 1);
    for (std::size_t i = 0; i < n; ++i)
        simplex[i + 1][i] += steps[i];
    for (std::size_t i = 0; i <= n; ++i)
        values[i] = evaluate(f, simplex[i], count);

    // An infeasible first vertex gets pulled toward the start.
    for (std::size_t i = 1; i <= n; ++i) {
        for (int k = 0; k < 30 && std::isinf(values[i]); ++k) {
            simplex[i][i - 1] = start[i - 1] - 0.5 * (simplex[i][i - 1] - start[i - 1]);
            values[i] = evaluate(f, simplex[i], count);
        }
    }

    std::vector<std::size_t> order(n + 1);
    std::vector<double> centroid(n), trial(n), trial2(n);
    bool converged = false;
    double record = std::numeric_limits<double>::infinity();
    int stalled = 0;

    while (count < options.max_evaluations) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
        const std::size_t best = order.front();
        const std::size_t worst = order.back();
        const std::size_t second = order[n - 1];

        const double diam = diameter(simplex, best);
        if (diam < options.tolerance) {
            converged = true;
            break;
        }
        // A small simplex sliding along the edge of the feasible region
        // stops shrinking; hand it back so the caller can rebuild it.
        if (diam < 0.5 * record) {
            record = diam;
            stalled = 0;
        } else if (++stalled > options.stall_iterations) {
            break;
        }

        std::fill(centroid.begin(), centroid.end(), 0.0);
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == worst)
                continue;
            for (std::size_t j = 0; j < n; ++j)
                centroid[j] += simplex[i][j] / static_cast<double>(n);
        }

        for (std::size_t j = 0; j < n; ++j)
            trial[j] = centroid[j] + (centroid[j] - simplex[worst][j]);
        const double fr = evaluate(f, trial, count);

        if (fr < values[best]) {
            for (std::size_t j = 0; j < n; ++j)
                trial2[j] = centroid[j] + 2.0 * (centroid[j] - simplex[worst][j]);
            const double fe = evaluate(f, trial2, count);
            if (fe < fr) {
                simplex[worst] = trial2;
                values[worst] = fe;
            } else {
                simplex[worst] = trial;
                values[worst] = fr;
            }
            continue;
        }
        if (fr < values[second]) {
            simplex[worst] = trial;
            values[worst] = fr;
            continue;
        }

        // Contraction, outside when the reflection improved on the worst.
        const bool outside = fr < values[worst];
        for (std::size_t j = 0; j < n; ++j) {
            const double toward = outside ? trial[j] : simplex[worst][j];
            trial2[j] = centroid[j] + 0.5 * (toward - centroid[j]);
        }
        const double fc = evaluate(f, trial2, count);
        if (fc < std::min(fr, values[worst])) {
            simplex[worst] = trial2;
            values[worst] = fc;
            continue;
        }

        // Shrink toward the best vertex.
        for (std::size_t i = 0; i <= n; ++i) {
            if (i == best)
                continue;
            for (std::size_t j = 0; j < n; ++j)
                simplex[i][j] = simplex[best][j] + 0.5 * (simplex[i][j] - simplex[best][j]);
            values[i] = evaluate(f, simplex[i], count);
        }
    }

    const auto it = std::min_element(values.begin(), values.end());
    const std::size_t best = static_cast<std::size_t>(it - values.begin());
    return {simplex[best], values[best], count, converged};
}

OptimResult minimize(const Objective& f, std::vector<double> start,
                     std::span<const double> steps, const SimplexOptions& options)
{
    // Fresh simplices from the incumbent until a rebuild no longer helps.
    const auto polish = [&](OptimResult r) {
        for (int round = 0; round < options.max_polish; ++round) {
            OptimResult again = nelder_mead(f, r.x, steps, options);
            again.evaluations += r.evaluations;
            const bool improved = again.value < r.value - 1e-10 * (1.0 + std::abs(r.value));
            if (again.value <= r.value) {
                r = std::move(again);
            } else {
                r.evaluations = again.evaluations;
            }
            // A rebuilt simplex that cannot improve marks a local optimum,
            // possibly on the edge of the feasible region.
            if (!improved) {
                r.converged = true;
                break;
            }
        }
        return r;
    };

    OptimResult best = polish(nelder_mead(f, start, steps, options));
    int total = best.evaluations;

    Rng rng(options.seed);
    for (int r = 0; r < options.restarts; ++r) {
        std::vector<double> x0(start.size());
        bool feasible = false;
        for (int attempt = 0; attempt < 10 && !feasible; ++attempt) {
            for (std::size_t j = 0; j < x0.size(); ++j)
                x0[j] = start[j] + steps[j] * rng.normal();
            feasible = std::isfinite(f(x0));
            ++total;
        }
        if (!feasible)
            continue;
        OptimResult candidate = polish(nelder_mead(f, x0, steps, options));
        total += candidate.evaluations;
        if (candidate.value < best.value)
            best = std::move(candidate);
    }
    best.evaluations = total;
    return best;
}

} // namespace heavytail
