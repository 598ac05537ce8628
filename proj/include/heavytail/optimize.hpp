#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace heavytail {

// Objective to minimise. Returning +inf (or NaN) marks a point infeasible;
// the simplex then contracts away from it.
using Objective = std::function<double(std::span<const double>)>;

struct SimplexOptions {
    double tolerance = 1e-8;      // simplex diameter at convergence
    int max_evaluations = 20000;
    int restarts = 5;             // random restarts around the start point
    int stall_iterations = 200;   // iterations without the simplex shrinking
    int max_polish = 20;          // simplex rebuilds at the incumbent
    std::uint64_t seed = 0x5EEDull;
};

struct OptimResult {
    std::vector<double> x;
    double value = 0.0;
    int evaluations = 0;
    bool converged = false;
};

// Nelder-Mead downhill simplex from a single start. `steps` gives the
// initial simplex edge per coordinate.
OptimResult nelder_mead(const Objective& f, std::vector<double> start,
                        std::span<const double> steps, const SimplexOptions& options = {});

// Nelder-Mead from `start`, then from `options.restarts` random points
// start + steps * N(0,1) (infeasible draws are redrawn a few times), each
// polished by one more restart at its optimum. Returns the best result;
// it is never worse than the start point.
OptimResult minimize(const Objective& f, std::vector<double> start,
                     std::span<const double> steps, const SimplexOptions& options = {});

} // namespace heavytail
