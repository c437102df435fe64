#include "roadhawk/monotone.hpp"

#include "roadhawk/catalog.hpp"
#include "roadhawk/kernels.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

namespace roadhawk {

InfeasibleError::InfeasibleError(std::vector<double> points)
    : std::runtime_error("monotone: no feasible weighting (" + std::to_string(points.size()) +
                         " check points violated)"),
      violated_points(std::move(points)) {}

double monotone_objective(std::span<const double> p) {
    const double n = static_cast<double>(p.size());
    double d0 = 0.0;
    for (double v : p) {
        if (!(v > 0.0)) return std::numeric_limits<double>::infinity();
        d0 -= std::log(n * v);
    }
    return d0;
}

namespace {

struct Basis {
    // phi[m * n + k] = scale_m * Y_k * K(u_m; c_k)
    std::vector<double> phi;
    std::vector<double> dphi; // analytic derivative, same layout
    std::size_t n_check = 0;
    std::size_t n_pts = 0;
};

Basis build_basis(const MonotoneProblem& prob) {
    Basis b;
    b.n_check = prob.check_grid.size();
    b.n_pts = prob.centers.size();
    b.phi.assign(b.n_check * b.n_pts, 0.0);
    b.dphi.assign(b.n_check * b.n_pts, 0.0);
    for (std::size_t m = 0; m < b.n_check; ++m) {
        const double u = prob.check_grid[m];
        const double s = prob.check_scale.empty() ? 1.0 : prob.check_scale[m];
        for (std::size_t k = 0; k < b.n_pts; ++k) {
            const double y = prob.base_weights[k];
            if (y == 0.0 || s == 0.0) continue;
            const double c = prob.centers[k];
            double v = gaussian(u - c, prob.bandwidth);
            double dv = gaussian_deriv(u - c, prob.bandwidth);
            if (prob.mirror_at_zero) {
                v += gaussian(u + c, prob.bandwidth);
                dv += gaussian_deriv(u + c, prob.bandwidth);
            }
            b.phi[m * b.n_pts + k] = s * y * v;
            b.dphi[m * b.n_pts + k] = s * y * dv;
        }
    }
    return b;
}

struct Rows {
    // a[r * n + k] coefficients, constraint a_r . p <= rhs_r
    std::vector<double> a;
    std::vector<double> rhs;
    std::vector<double> point; // check coordinate a row is anchored to
    std::size_t n_rows = 0;
    std::size_t n_pts = 0;
};

// Slope rows bound the analytic derivative at each check point; difference
// rows bound consecutive cache values (they also capture steps of the
// repetition scale, which the derivative alone does not see).
Rows build_rows(const MonotoneProblem& prob, const Basis& basis) {
    Rows rows;
    rows.n_pts = basis.n_pts;
    const std::size_t m_check = basis.n_check;
    std::vector<double> row(basis.n_pts);
    auto push = [&](double rhs, double point) {
        double norm = 0.0;
        for (double v : row) norm = std::max(norm, std::abs(v));
        if (norm == 0.0) return; // 0 <= rhs always holds (epsilon >= 0)
        for (double v : row) rows.a.push_back(v / norm);
        rows.rhs.push_back(rhs / norm);
        rows.point.push_back(point);
        ++rows.n_rows;
    };
    for (std::size_t m = 0; m < m_check; ++m) {
        for (std::size_t k = 0; k < basis.n_pts; ++k) row[k] = basis.dphi[m * basis.n_pts + k];
        push(prob.epsilon, prob.check_grid[m]);
    }
    for (std::size_t m = 0; m + 1 < m_check; ++m) {
        const double du = prob.check_grid[m + 1] - prob.check_grid[m];
        for (std::size_t k = 0; k < basis.n_pts; ++k)
            row[k] = basis.phi[(m + 1) * basis.n_pts + k] - basis.phi[m * basis.n_pts + k];
        push(prob.epsilon * du, prob.check_grid[m + 1]);
    }
    return rows;
}

void slacks_at(const Rows& rows, std::span<const std::size_t> idx, std::span<const double> p,
               std::vector<double>& out) {
    out.resize(idx.size());
    for (std::size_t r = 0; r < idx.size(); ++r) {
        const double* a = rows.a.data() + idx[r] * rows.n_pts;
        double dot = 0.0;
        for (std::size_t k = 0; k < rows.n_pts; ++k) dot += a[k] * p[k];
        out[r] = rows.rhs[idx[r]] - dot;
    }
}

void project_simplex(std::vector<double>& p) {
    std::vector<double> u(p);
    std::sort(u.begin(), u.end(), std::greater<double>());
    double cssv = 0.0;
    double theta = 0.0;
    std::size_t rho = 0;
    double cum = 0.0;
    for (std::size_t j = 0; j < u.size(); ++j) {
        cum += u[j];
        const double t = (cum - 1.0) / static_cast<double>(j + 1);
        if (u[j] - t > 0.0) {
            rho = j + 1;
            cssv = cum;
        }
    }
    theta = (cssv - 1.0) / static_cast<double>(rho);
    for (double& v : p) v = std::max(v - theta, 0.0);
}

// Projected-gradient feasibility restoration: minimize the squared hinge of
// the active-row violations over the simplex.
bool restore_feasibility(const Rows& rows, std::span<const std::size_t> idx,
                         std::vector<double>& p, double margin) {
    std::vector<double> slack;
    std::vector<double> grad(rows.n_pts);
    double eta = 1.0;
    auto objective = [&](const std::vector<double>& q) {
        double f = 0.0;
        for (std::size_t r = 0; r < idx.size(); ++r) {
            const double* a = rows.a.data() + idx[r] * rows.n_pts;
            double dot = 0.0;
            for (std::size_t k = 0; k < rows.n_pts; ++k) dot += a[k] * q[k];
            const double v = dot - rows.rhs[idx[r]] + margin;
            if (v > 0.0) f += 0.5 * v * v;
        }
        return f;
    };
    double f = objective(p);
    std::vector<double> trial(p.size());
    for (int iter = 0; iter < 20000 && f > 0.0; ++iter) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t r = 0; r < idx.size(); ++r) {
            const double* a = rows.a.data() + idx[r] * rows.n_pts;
            double dot = 0.0;
            for (std::size_t k = 0; k < rows.n_pts; ++k) dot += a[k] * p[k];
            const double v = dot - rows.rhs[idx[r]] + margin;
            if (v > 0.0)
                for (std::size_t k = 0; k < rows.n_pts; ++k) grad[k] += v * a[k];
        }
        bool accepted = false;
        for (int ls = 0; ls < 60; ++ls) {
            for (std::size_t k = 0; k < p.size(); ++k) trial[k] = p[k] - eta * grad[k];
            project_simplex(trial);
            const double ft = objective(trial);
            if (ft < f) {
                p = trial;
                f = ft;
                eta *= 1.6;
                accepted = true;
                break;
            }
            eta *= 0.5;
        }
        if (!accepted) break;
    }
    slacks_at(rows, idx, p, slack);
    for (double s : slack)
        if (!(s > 0.0)) return false;
    return true;
}

// Projected gradient tends to stop on a face (often a vertex); pull the
// point toward uniform as far as the active slacks allow so the barrier
// starts from a usable interior point.
void pull_interior(const Rows& rows, std::span<const std::size_t> idx, std::vector<double>& p) {
    const double n = static_cast<double>(p.size());
    std::vector<double> trial(p.size());
    std::vector<double> slack;
    for (double theta : {0.5, 0.25, 0.1, 0.05, 0.02, 0.01, 3e-3, 1e-3, 1e-4, 1e-5, 1e-6}) {
        for (std::size_t k = 0; k < p.size(); ++k)
            trial[k] = (1.0 - theta) * p[k] + theta / n;
        slacks_at(rows, idx, trial, slack);
        bool ok = true;
        for (double s : slack)
            if (!(s > 1e-13)) {
                ok = false;
                break;
            }
        if (ok) {
            p = trial;
            return;
        }
    }
}

struct DenseChol {
    std::vector<double> l;
    std::size_t n = 0;
    bool factor(const std::vector<double>& m, std::size_t dim) {
        n = dim;
        l = m;
        for (std::size_t j = 0; j < n; ++j) {
            double d = l[j * n + j];
            for (std::size_t k = 0; k < j; ++k) d -= l[j * n + k] * l[j * n + k];
            if (!(d > 0.0)) return false;
            const double lj = std::sqrt(d);
            l[j * n + j] = lj;
            for (std::size_t i = j + 1; i < n; ++i) {
                double v = l[i * n + j];
                for (std::size_t k = 0; k < j; ++k) v -= l[i * n + k] * l[j * n + k];
                l[i * n + j] = v / lj;
            }
        }
        return true;
    }
    void solve(std::vector<double>& b) const {
        for (std::size_t i = 0; i < n; ++i) {
            double v = b[i];
            for (std::size_t k = 0; k < i; ++k) v -= l[i * n + k] * b[k];
            b[i] = v / l[i * n + i];
        }
        for (std::size_t ii = n; ii-- > 0;) {
            double v = b[ii];
            for (std::size_t k = ii + 1; k < n; ++k) v -= l[k * n + ii] * b[k];
            b[ii] = v / l[ii * n + ii];
        }
    }
};

// Equality-constrained Newton on the barrier objective
//   -sum log(N p) - mu * sum log(slack_r),  s.t. 1'p = 1,
// with the Hessian inverted through the Woodbury identity (the row count of
// the active set stays far below the number of points).
struct BarrierSolver {
    const Rows& rows;
    const std::vector<std::size_t>& active;
    std::vector<double> slack;
    int newton_steps = 0;

    explicit BarrierSolver(const Rows& r, const std::vector<std::size_t>& act)
        : rows(r), active(act) {}

    double barrier_value(std::span<const double> p, double mu) {
        const double n = static_cast<double>(p.size());
        double f = 0.0;
        for (double v : p) {
            if (!(v > 0.0)) return std::numeric_limits<double>::infinity();
            f -= std::log(n * v);
        }
        slacks_at(rows, active, p, slack);
        for (double s : slack) {
            if (!(s > 0.0)) return std::numeric_limits<double>::infinity();
            f -= mu * std::log(s);
        }
        return f;
    }

    // One centering stage at fixed mu.
    void center(std::vector<double>& p, double mu) {
        const std::size_t n = p.size();
        const std::size_t m = active.size();
        std::vector<double> grad(n), dinv(n), hinv_g(n), hinv_one(n), dp(n);
        std::vector<double> bmat; // m x n scaled rows
        std::vector<double> w;    // m x m
        std::vector<double> tmp_m1, tmp_m2;
        std::vector<double> trial(n);
        for (int it = 0; it < 200; ++it) {
            slacks_at(rows, active, p, slack);
            for (std::size_t k = 0; k < n; ++k) grad[k] = -1.0 / p[k];
            bmat.assign(m * n, 0.0);
            for (std::size_t r = 0; r < m; ++r) {
                const double* a = rows.a.data() + active[r] * rows.n_pts;
                const double inv_s = 1.0 / slack[r];
                const double srow = std::sqrt(mu) * inv_s;
                for (std::size_t k = 0; k < n; ++k) {
                    grad[k] += mu * a[k] * inv_s;
                    bmat[r * n + k] = srow * a[k];
                }
            }
            for (std::size_t k = 0; k < n; ++k) dinv[k] = p[k] * p[k]; // (1/p^2)^-1

            // W = I + B D^-1 B'
            w.assign(m * m, 0.0);
            for (std::size_t r = 0; r < m; ++r) {
                for (std::size_t c = r; c < m; ++c) {
                    double dot = 0.0;
                    for (std::size_t k = 0; k < n; ++k)
                        dot += bmat[r * n + k] * dinv[k] * bmat[c * n + k];
                    w[r * m + c] = dot + (r == c ? 1.0 : 0.0);
                    w[c * m + r] = w[r * m + c];
                }
            }
            DenseChol chol;
            if (m > 0 && !chol.factor(w, m)) return; // numerically stuck; caller re-centers

            auto hinv = [&](std::span<const double> v, std::vector<double>& out) {
                out.resize(n);
                for (std::size_t k = 0; k < n; ++k) out[k] = dinv[k] * v[k];
                if (m == 0) return;
                tmp_m1.assign(m, 0.0);
                for (std::size_t r = 0; r < m; ++r) {
                    double dot = 0.0;
                    for (std::size_t k = 0; k < n; ++k) dot += bmat[r * n + k] * out[k];
                    tmp_m1[r] = dot;
                }
                chol.solve(tmp_m1);
                for (std::size_t k = 0; k < n; ++k) {
                    double corr = 0.0;
                    for (std::size_t r = 0; r < m; ++r) corr += bmat[r * n + k] * tmp_m1[r];
                    out[k] -= dinv[k] * corr;
                }
            };

            hinv(grad, hinv_g);
            std::vector<double> ones(n, 1.0);
            hinv(ones, hinv_one);
            double sum_hg = std::accumulate(hinv_g.begin(), hinv_g.end(), 0.0);
            double sum_h1 = std::accumulate(hinv_one.begin(), hinv_one.end(), 0.0);
            const double nu = -sum_hg / sum_h1;
            double decrement = 0.0;
            for (std::size_t k = 0; k < n; ++k) {
                dp[k] = -(hinv_g[k] + nu * hinv_one[k]);
                decrement += -grad[k] * dp[k];
            }
            ++newton_steps;
            if (decrement * 0.5 < 1e-13) return;

            const double f0 = barrier_value(p, mu);
            double step = 1.0;
            bool ok = false;
            for (int ls = 0; ls < 60; ++ls) {
                for (std::size_t k = 0; k < n; ++k) trial[k] = p[k] + step * dp[k];
                const double ft = barrier_value(trial, mu);
                if (std::isfinite(ft) && ft <= f0 - 1e-4 * step * decrement) {
                    p = trial;
                    ok = true;
                    break;
                }
                step *= 0.5;
            }
            if (!ok) return;
        }
    }
};

} // namespace

std::vector<double> monotone_adjusted_curve(const MonotoneProblem& problem,
                                            std::span<const double> p) {
    Basis basis = build_basis(problem);
    std::vector<double> out(basis.n_check, 0.0);
    for (std::size_t m = 0; m < basis.n_check; ++m) {
        double acc = 0.0;
        for (std::size_t k = 0; k < basis.n_pts; ++k) acc += p[k] * basis.phi[m * basis.n_pts + k];
        out[m] = acc;
    }
    return out;
}

MonotoneSolution solve_monotone(const MonotoneProblem& problem) {
    const std::size_t n = problem.centers.size();
    if (n == 0) throw Error("monotone: empty problem");
    if (problem.base_weights.size() != n)
        throw Error("monotone: centers/base_weights length mismatch");
    if (problem.epsilon < 0.0) throw Error("monotone: epsilon must be nonnegative");
    if (!problem.check_scale.empty() && problem.check_scale.size() != problem.check_grid.size())
        throw Error("monotone: check_scale length mismatch");

    Basis basis = build_basis(problem);
    Rows rows = build_rows(problem, basis);

    MonotoneSolution sol;
    sol.p.assign(n, 1.0 / static_cast<double>(n));

    std::vector<std::size_t> all_rows(rows.n_rows);
    std::iota(all_rows.begin(), all_rows.end(), std::size_t{0});
    std::vector<double> slack;
    slacks_at(rows, all_rows, sol.p, slack);
    constexpr double kFeasTol = 1e-11;

    auto violated_rows = [&](const std::vector<double>& p_now) {
        slacks_at(rows, all_rows, p_now, slack);
        std::vector<std::size_t> out;
        for (std::size_t r = 0; r < rows.n_rows; ++r)
            if (slack[r] < -kFeasTol) out.push_back(r);
        return out;
    };

    auto initial_violations = violated_rows(sol.p);
    if (initial_violations.empty()) {
        sol.already_monotone = true;
        sol.objective = 0.0;
        sol.adjusted = monotone_adjusted_curve(problem, sol.p);
        return sol;
    }
    if (n == 1) {
        // p is pinned to (1); nothing can be reweighted.
        std::vector<double> pts;
        for (std::size_t r : initial_violations) pts.push_back(rows.point[r]);
        throw InfeasibleError(std::move(pts));
    }

    std::vector<std::size_t> active = initial_violations;
    std::sort(active.begin(), active.end());

    std::vector<double> p = sol.p;
    int total_newton = 0;
    for (int round = 0; round < 60; ++round) {
        if (!restore_feasibility(rows, active, p, 1e-9)) {
            // Could not clear the active rows strictly; try once more with no
            // margin before declaring the program infeasible.
            if (!restore_feasibility(rows, active, p, 0.0)) {
                std::vector<double> pts;
                slacks_at(rows, all_rows, p, slack);
                for (std::size_t r = 0; r < rows.n_rows; ++r)
                    if (slack[r] < -kFeasTol) pts.push_back(rows.point[r]);
                if (pts.empty()) pts.push_back(problem.check_grid.empty() ? 0.0
                                                                          : problem.check_grid[0]);
                throw InfeasibleError(std::move(pts));
            }
        }
        pull_interior(rows, active, p);
        for (double& v : p) v = std::max(v, 1e-300);

        BarrierSolver solver(rows, active);
        double mu = 1.0;
        const double mu_floor = 1e-9 / static_cast<double>(std::max<std::size_t>(active.size(), 1));
        while (true) {
            solver.center(p, mu);
            if (mu <= mu_floor) break;
            mu = std::max(mu * 0.12, mu_floor * 0.999);
        }
        total_newton += solver.newton_steps;

        auto fresh = violated_rows(p);
        std::vector<std::size_t> to_add;
        for (std::size_t r : fresh)
            if (!std::binary_search(active.begin(), active.end(), r)) to_add.push_back(r);
        if (to_add.empty()) break;
        for (std::size_t r : to_add) active.push_back(r);
        std::sort(active.begin(), active.end());
    }

    sol.p = p;
    sol.objective = monotone_objective(p);
    sol.newton_steps = total_newton;
    sol.adjusted = monotone_adjusted_curve(problem, p);
    return sol;
}

} // namespace roadhawk
