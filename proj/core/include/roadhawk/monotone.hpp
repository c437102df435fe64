#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace roadhawk {

// Reweighting problem for a kernel-smoothed estimate
//   nu(u | p) = scale(u) * sum_k p_k * Y_k * K(u; c_k)
// with K Gaussian (optionally mirrored at zero). Find the simplex weights p
// closest to uniform in D0(p) = -sum log(N p_k) subject to the fit being
// non-increasing (slope <= epsilon) at every check-grid point. scale holds
// any p-independent per-point factor (the repetition correction); empty
// means 1 everywhere.
struct MonotoneProblem {
    std::vector<double> centers;
    std::vector<double> base_weights;
    double bandwidth = 1.0;
    bool mirror_at_zero = false;
    std::vector<double> check_grid;
    std::vector<double> check_scale;
    double epsilon = 0.0;
};

struct MonotoneSolution {
    std::vector<double> p;
    double objective = 0.0;        // D0 at p
    bool already_monotone = false; // uniform weights were feasible
    int newton_steps = 0;
    std::vector<double> adjusted;  // nu(u | p) on the check grid
};

struct InfeasibleError : std::runtime_error {
    std::vector<double> violated_points;
    explicit InfeasibleError(std::vector<double> points);
};

double monotone_objective(std::span<const double> p);

// Evaluates nu(u | p) on the check grid for arbitrary weights.
std::vector<double> monotone_adjusted_curve(const MonotoneProblem& problem,
                                            std::span<const double> p);

// Solves the convex program to a relative objective accuracy of 1e-6.
// Throws InfeasibleError (listing violated check points) when no simplex
// weighting can satisfy the slope constraints.
MonotoneSolution solve_monotone(const MonotoneProblem& problem);

} // namespace roadhawk
