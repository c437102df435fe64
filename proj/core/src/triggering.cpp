#include "roadhawk/triggering.hpp"

#include "roadhawk/monotone.hpp"

#include <algorithm>
#include <cmath>

namespace roadhawk {

PairSet enumerate_pairs(const EventCatalog& catalog, double horizon_t, double horizon_x) {
    if (!(horizon_t > 0.0) || !(horizon_x > 0.0))
        throw Error("enumerate_pairs: horizons must be positive");
    const auto& ev = catalog.events;
    PairSet out;
    out.target_begin.assign(ev.size() + 1, 0);
    for (std::size_t j = 0; j < ev.size(); ++j) {
        out.target_begin[j] = out.pairs.size();
        const double tj = ev[j].t;
        const double xj = ev[j].x;
        auto first = std::lower_bound(ev.begin(), ev.begin() + static_cast<std::ptrdiff_t>(j),
                                      tj - horizon_t,
                                      [](const Event& e, double v) { return e.t < v; });
        for (auto it = first; it != ev.begin() + static_cast<std::ptrdiff_t>(j); ++it) {
            if (!(it->t < tj)) continue;
            const double dx_up = it->x - xj;
            if (dx_up <= 0.0 || dx_up > horizon_x) continue;
            EventPair p;
            p.cause = static_cast<std::size_t>(it - ev.begin());
            p.target = j;
            p.dt = tj - it->t;
            p.dx_up = dx_up;
            out.pairs.push_back(p);
        }
    }
    out.target_begin[ev.size()] = out.pairs.size();
    return out;
}

void compute_rho(PairSet& pairs, const EventCatalog& catalog, const ModelComponents& model) {
    const auto& ev = catalog.events;
    for (std::size_t j = 0; j < ev.size(); ++j) {
        const std::size_t begin = pairs.target_begin[j];
        const std::size_t end = pairs.target_begin[j + 1];
        if (begin == end) continue;
        const double bg = model.background_at(ev[j].t, ev[j].x);
        double trig = 0.0;
        for (std::size_t k = begin; k < end; ++k)
            trig += model.g.value(pairs.pairs[k].dt) * model.h.value(pairs.pairs[k].dx_up);
        const double lambda = bg + model.branching * trig;
        if (!(lambda > 0.0))
            throw Error("compute_rho: intensity vanishes at event " + std::to_string(j));
        for (std::size_t k = begin; k < end; ++k) {
            const double num = model.branching * model.g.value(pairs.pairs[k].dt) *
                               model.h.value(pairs.pairs[k].dx_up);
            pairs.pairs[k].rho = num / lambda;
        }
    }
}

namespace {

struct TriggerInputs {
    std::vector<double> centers;
    std::vector<double> rho;
    std::vector<double> limits;     // per-pair admissible range
    std::vector<double> repetition; // per cache point
};

TriggerCurve build_trigger(const TriggerInputs& in, double omega, double horizon,
                           double grid_step, const std::optional<MonotoneSettings>& monotone) {
    TriggerCurve curve;
    curve.horizon = horizon;
    curve.bandwidth = omega;
    curve.centers = in.centers;
    curve.weights = in.rho;
    curve.upper_limits = in.limits;

    const auto n_cache = static_cast<std::size_t>(std::ceil(horizon / grid_step - 1e-9)) + 1;
    curve.cache.lo = 0.0;
    curve.cache.hi = horizon;
    curve.cache.values.assign(std::max<std::size_t>(n_cache, 2), 0.0);

    double total = 0.0;
    for (double r : in.rho) total += r;
    if (in.centers.empty() || total <= 0.0) {
        curve.no_evidence = true;
        curve.cumulative = curve.cache.prefix_integral();
        return curve;
    }

    const std::size_t n_pts = in.centers.size();
    std::vector<double> inv_mass(n_pts, 0.0);
    for (std::size_t k = 0; k < n_pts; ++k) {
        const double mass = truncated_mass(in.centers[k], omega, 0.0, in.limits[k], true, false);
        inv_mass[k] = mass > 0.0 ? 1.0 / mass : 0.0;
    }

    const std::size_t m_cache = curve.cache.values.size();
    const double step = curve.cache.step();
    std::vector<double> grid(m_cache), scale(m_cache);
    for (std::size_t m = 0; m < m_cache; ++m) {
        grid[m] = step * static_cast<double>(m);
        scale[m] = in.repetition[m] > 0.0 ? 1.0 / in.repetition[m] : 0.0;
    }

    std::vector<double> weights = in.rho;
    if (monotone) {
        MonotoneProblem prob;
        prob.centers = in.centers;
        prob.base_weights.resize(n_pts);
        for (std::size_t k = 0; k < n_pts; ++k) prob.base_weights[k] = in.rho[k] * inv_mass[k];
        prob.bandwidth = omega;
        prob.mirror_at_zero = true;
        prob.check_grid = grid;
        prob.check_scale = scale;
        prob.epsilon = monotone->epsilon;
        MonotoneSolution sol = solve_monotone(prob);
        const double n = static_cast<double>(n_pts);
        for (std::size_t k = 0; k < n_pts; ++k) weights[k] = in.rho[k] * n * sol.p[k];
        curve.monotone_adjusted = true;
        curve.weights = weights;
    }

    const double inv2w2 = 1.0 / (2.0 * omega * omega);
    const double norm_k = 0.3989422804014326779 / omega;
    for (std::size_t m = 0; m < m_cache; ++m) {
        if (scale[m] == 0.0) {
            curve.cache.values[m] = 0.0;
            continue;
        }
        const double u = grid[m];
        double acc = 0.0;
        for (std::size_t k = 0; k < n_pts; ++k) {
            const double w = weights[k] * inv_mass[k];
            if (w == 0.0) continue;
            const double d0 = u - in.centers[k];
            const double d1 = u + in.centers[k];
            acc += w * (std::exp(-d0 * d0 * inv2w2) + std::exp(-d1 * d1 * inv2w2));
        }
        curve.cache.values[m] = acc * norm_k * scale[m];
    }

    const double integral = curve.cache.trapezoid();
    if (!(integral > 0.0)) {
        curve.no_evidence = true;
        curve.cumulative = curve.cache.prefix_integral();
        return curve;
    }
    for (double& v : curve.cache.values) v /= integral;
    curve.norm = integral;
    curve.cumulative = curve.cache.prefix_integral();
    return curve;
}

} // namespace

TriggerCurve estimate_g(const PairSet& pairs, const EventCatalog& catalog, double omega,
                        double horizon, double grid_step,
                        const std::optional<MonotoneSettings>& monotone) {
    if (!(omega > 0.0)) throw Error("estimate_g: degenerate bandwidth");
    const double t_len = catalog.domain.t_len;
    TriggerInputs in;
    in.centers.reserve(pairs.size());
    for (const EventPair& p : pairs.pairs) {
        in.centers.push_back(p.dt);
        in.rho.push_back(p.rho);
        in.limits.push_back(std::min(horizon, t_len - catalog.events[p.cause].t));
    }
    const auto n_cache = static_cast<std::size_t>(std::ceil(horizon / grid_step - 1e-9)) + 1;
    in.repetition.resize(std::max<std::size_t>(n_cache, 2));
    const double step = horizon / static_cast<double>(in.repetition.size() - 1);
    // events are time sorted: #{i : t_i <= T - t}
    const auto& ev = catalog.events;
    for (std::size_t m = 0; m < in.repetition.size(); ++m) {
        const double cutoff = t_len - step * static_cast<double>(m);
        auto it = std::upper_bound(ev.begin(), ev.end(), cutoff,
                                   [](double v, const Event& e) { return v < e.t; });
        in.repetition[m] = static_cast<double>(it - ev.begin());
    }
    return build_trigger(in, omega, horizon, grid_step, monotone);
}

TriggerCurve estimate_h(const PairSet& pairs, const EventCatalog& catalog, double omega,
                        double horizon, double grid_step,
                        const std::optional<MonotoneSettings>& monotone) {
    if (!(omega > 0.0)) throw Error("estimate_h: degenerate bandwidth");
    TriggerInputs in;
    in.centers.reserve(pairs.size());
    for (const EventPair& p : pairs.pairs) {
        in.centers.push_back(p.dx_up);
        in.rho.push_back(p.rho);
        in.limits.push_back(std::min(horizon, catalog.events[p.cause].x));
    }
    std::vector<double> xs(catalog.size());
    for (std::size_t i = 0; i < catalog.size(); ++i) xs[i] = catalog.events[i].x;
    std::sort(xs.begin(), xs.end());
    const auto n_cache = static_cast<std::size_t>(std::ceil(horizon / grid_step - 1e-9)) + 1;
    in.repetition.resize(std::max<std::size_t>(n_cache, 2));
    const double step = horizon / static_cast<double>(in.repetition.size() - 1);
    // #{i : x_i >= x}
    for (std::size_t m = 0; m < in.repetition.size(); ++m) {
        const double x = step * static_cast<double>(m);
        auto it = std::lower_bound(xs.begin(), xs.end(), x);
        in.repetition[m] = static_cast<double>(xs.end() - it);
    }
    return build_trigger(in, omega, horizon, grid_step, monotone);
}

} // namespace roadhawk
