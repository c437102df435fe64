#include "roadhawk/monotone.hpp"

#include "roadhawk/kernels.hpp"

#include <doctest.h>

#include <cmath>
#include <vector>

using namespace roadhawk;

namespace {

// Independent feasibility check: evaluates the adjusted fit directly from
// the Gaussian formulas, never through the solver's constraint rows.
bool oracle_feasible(const MonotoneProblem& prob, const std::vector<double>& p, double slop = 1e-9) {
    const std::size_t m = prob.check_grid.size();
    std::vector<double> value(m, 0.0), deriv(m, 0.0);
    for (std::size_t i = 0; i < m; ++i) {
        const double u = prob.check_grid[i];
        const double s = prob.check_scale.empty() ? 1.0 : prob.check_scale[i];
        for (std::size_t k = 0; k < p.size(); ++k) {
            double v = gaussian(u - prob.centers[k], prob.bandwidth);
            double dv = gaussian_deriv(u - prob.centers[k], prob.bandwidth);
            if (prob.mirror_at_zero) {
                v += gaussian(u + prob.centers[k], prob.bandwidth);
                dv += gaussian_deriv(u + prob.centers[k], prob.bandwidth);
            }
            value[i] += s * p[k] * prob.base_weights[k] * v;
            deriv[i] += s * p[k] * prob.base_weights[k] * dv;
        }
    }
    for (std::size_t i = 0; i < m; ++i)
        if (deriv[i] > prob.epsilon + slop) return false;
    for (std::size_t i = 0; i + 1 < m; ++i) {
        const double du = prob.check_grid[i + 1] - prob.check_grid[i];
        if (value[i + 1] - value[i] > prob.epsilon * du + slop) return false;
    }
    return true;
}

// Dense simplex-grid search (resolution 0.01) with branch-and-bound pruning;
// the oracle for small instances.
struct GridSearch {
    const MonotoneProblem& prob;
    int units;
    double best = std::numeric_limits<double>::infinity();
    std::vector<int> current;
    std::vector<double> p;

    explicit GridSearch(const MonotoneProblem& pr, int resolution_units)
        : prob(pr), units(resolution_units), current(pr.centers.size(), 0),
          p(pr.centers.size(), 0.0) {}

    double run(double seed_bound) {
        best = seed_bound;
        descend(0, units, 0.0);
        return best;
    }

    void descend(std::size_t k, int remaining_units, double partial) {
        const std::size_t n = prob.centers.size();
        const double dn = static_cast<double>(n);
        const std::size_t rem = n - k;
        if (rem == 1) {
            current[k] = remaining_units;
            if (remaining_units == 0) return;
            const double pk = static_cast<double>(remaining_units) / units;
            const double d0 = partial - std::log(dn * pk);
            if (d0 >= best) return;
            for (std::size_t i = 0; i < n; ++i)
                p[i] = static_cast<double>(current[i]) / units;
            if (oracle_feasible(prob, p)) best = d0;
            return;
        }
        for (int m = 1; m + static_cast<int>(rem) - 1 <= remaining_units; ++m) {
            const double pk = static_cast<double>(m) / units;
            const double term = -std::log(dn * pk);
            const double mass_left = static_cast<double>(remaining_units - m) / units;
            const double rem_terms = static_cast<double>(rem - 1);
            // remaining objective is minimized by spreading the mass equally
            const double bound =
                partial + term - rem_terms * std::log(dn * mass_left / rem_terms);
            if (bound >= best) continue;
            current[k] = m;
            descend(k + 1, remaining_units - m, partial + term);
        }
    }
};

double brute_force_optimum(const MonotoneProblem& prob) {
    GridSearch coarse(prob, 20);
    const double seed = coarse.run(std::numeric_limits<double>::infinity());
    GridSearch fine(prob, 100);
    return fine.run(seed + 1e-12);
}

MonotoneProblem fixture(std::vector<double> centers, std::vector<double> weights, double omega,
                        double grid_hi, std::size_t grid_n, double epsilon) {
    MonotoneProblem prob;
    prob.centers = std::move(centers);
    prob.base_weights = std::move(weights);
    prob.bandwidth = omega;
    prob.mirror_at_zero = true;
    prob.epsilon = epsilon;
    for (std::size_t i = 0; i < grid_n; ++i)
        prob.check_grid.push_back(grid_hi * static_cast<double>(i) /
                                  static_cast<double>(grid_n - 1));
    return prob;
}

} // namespace

TEST_CASE("D0 objective hand values") {
    std::vector<double> p{0.25, 0.75};
    CHECK(monotone_objective(p) == doctest::Approx(0.287682).epsilon(1e-5));
    std::vector<double> uniform{0.2, 0.2, 0.2, 0.2, 0.2};
    CHECK(monotone_objective(uniform) == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("already-monotone input returns exact uniform weights") {
    // wide kernels near zero: the uniform mixture is already non-increasing
    MonotoneProblem prob = fixture({0.05, 0.2, 0.35}, {1.0, 0.8, 0.6}, 2.0, 6.0, 13, 0.0);
    MonotoneSolution sol = solve_monotone(prob);
    CHECK(sol.already_monotone);
    CHECK(sol.objective == 0.0);
    for (double v : sol.p) CHECK(v == 1.0 / 3.0);
}

TEST_CASE("small instances match the brute-force simplex grid") {
    std::vector<MonotoneProblem> fixtures;
    fixtures.push_back(fixture({0.5, 1.0, 2.5}, {1.0, 1.0, 1.0}, 1.0, 4.0, 12, 0.0));
    fixtures.push_back(fixture({0.2, 3.0}, {1.0, 0.8}, 0.8, 5.0, 11, 0.0));
    fixtures.push_back(fixture({0.1, 0.7, 1.6, 2.8}, {0.5, 1.0, 0.9, 1.2}, 0.9, 4.5, 10, 0.0));
    fixtures.push_back(
        fixture({0.1, 0.4, 0.9, 1.3, 2.2, 3.4}, {1.0, 0.7, 1.1, 0.8, 0.9, 1.3}, 1.2, 5.0, 11, 0.0));
    fixtures.push_back(fixture({0.5, 1.0, 2.5}, {1.0, 1.0, 1.0}, 1.0, 4.0, 12, 0.01));

    for (const MonotoneProblem& prob : fixtures) {
        MonotoneSolution sol = solve_monotone(prob);
        CHECK(oracle_feasible(prob, sol.p));
        const double grid_best = brute_force_optimum(prob);
        // the solver optimizes over the full simplex, the oracle over its grid
        CHECK(sol.objective <= grid_best + 1e-3);
        CHECK(sol.objective >= -1e-12);
        if (std::isfinite(grid_best)) CHECK(grid_best - sol.objective >= -1e-3);
    }
}

TEST_CASE("adjusted curves are non-increasing on the check grid") {
    MonotoneProblem prob = fixture({0.5, 1.0, 2.5}, {1.0, 1.0, 1.0}, 1.0, 4.0, 12, 0.0);
    MonotoneSolution sol = solve_monotone(prob);
    for (std::size_t i = 0; i + 1 < sol.adjusted.size(); ++i)
        CHECK(sol.adjusted[i + 1] - sol.adjusted[i] <= prob.epsilon + 1e-9);
}

TEST_CASE("first-order optimality: no feasible pair transfer improves D0") {
    MonotoneProblem prob =
        fixture({0.1, 0.7, 1.6, 2.8}, {0.5, 1.0, 0.9, 1.2}, 0.9, 4.5, 10, 0.0);
    MonotoneSolution sol = solve_monotone(prob);
    const double d0 = sol.objective;
    const double delta = 1e-6;
    for (std::size_t i = 0; i < sol.p.size(); ++i) {
        for (std::size_t j = 0; j < sol.p.size(); ++j) {
            if (i == j || sol.p[i] <= delta) continue;
            std::vector<double> q = sol.p;
            q[i] -= delta;
            q[j] += delta;
            if (!oracle_feasible(prob, q)) continue;
            CHECK(monotone_objective(q) >= d0 - 1e-8);
        }
    }
}

TEST_CASE("tightening epsilon never decreases D0") {
    MonotoneProblem loose = fixture({0.5, 1.0, 2.5}, {1.0, 1.0, 1.0}, 1.0, 4.0, 12, 0.05);
    MonotoneProblem tight = loose;
    tight.epsilon = 0.0;
    const double d_loose = solve_monotone(loose).objective;
    const double d_tight = solve_monotone(tight).objective;
    CHECK(d_tight >= d_loose - 1e-9);
}

TEST_CASE("infeasible problems are reported with violated points") {
    // every kernel centered far from zero: any mixture rises toward the mode
    MonotoneProblem prob = fixture({3.0, 3.2}, {1.0, 1.0}, 0.5, 4.0, 9, 0.0);
    CHECK_THROWS_AS(solve_monotone(prob), InfeasibleError);
    MonotoneProblem single = fixture({3.0}, {1.0}, 0.5, 4.0, 9, 0.0);
    try {
        solve_monotone(single);
        FAIL("expected infeasibility");
    } catch (const InfeasibleError& e) {
        CHECK(!e.violated_points.empty());
    }
}

TEST_CASE("repetition scale folds into the constraints") {
    // a step in the scale makes the plain mixture non-monotone at the step
    MonotoneProblem prob = fixture({0.2, 1.2}, {1.0, 1.0}, 0.8, 4.0, 17, 0.0);
    prob.check_scale.assign(prob.check_grid.size(), 1.0);
    for (std::size_t i = 9; i < prob.check_scale.size(); ++i) prob.check_scale[i] = 1.25;
    MonotoneSolution sol = solve_monotone(prob);
    CHECK(oracle_feasible(prob, sol.p));
}
