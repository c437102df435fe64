#include "roadhawk/background.hpp"

#include <algorithm>
#include <cmath>

namespace roadhawk {

namespace {

// Kernel sums are evaluated on a coarse grid no finer than the curve can
// vary (step <= omega / 50) and interpolated onto the requested cache grid.
struct EstimationGrid {
    double step;
    std::size_t n;
};

EstimationGrid pick_grid(double domain_len, double omega, double grid_step) {
    const double coarse = std::max(grid_step, omega / 50.0);
    auto n = static_cast<std::size_t>(std::ceil(domain_len / coarse - 1e-9));
    n = std::max<std::size_t>(n, 8);
    return {domain_len / static_cast<double>(n), n + 1};
}

} // namespace

ComponentCurve estimate_component(std::span<const double> centers, std::span<const double> weights,
                                  double domain_len, bool periodic, double omega, double grid_step,
                                  CurveAxis axis) {
    if (centers.size() != weights.size())
        throw Error("estimate_component: centers/weights length mismatch");
    if (!(omega > 0.0) || !(grid_step > 0.0) || !(domain_len > 0.0))
        throw Error("estimate_component: bad parameters");

    ComponentCurve curve;
    curve.axis = axis;
    curve.domain_len = domain_len;
    curve.periodic = periodic;
    curve.kernel.bandwidth = omega;
    if (periodic) {
        curve.kernel.kind = DomainKind::periodic;
        curve.kernel.period = domain_len;
    } else {
        curve.kernel.kind = DomainKind::truncated;
        curve.kernel.lo = 0.0;
        curve.kernel.hi = domain_len;
        curve.kernel.mirror_lo = curve.kernel.mirror_hi = true;
    }
    curve.centers.assign(centers.begin(), centers.end());
    curve.weights.assign(weights.begin(), weights.end());

    double total_weight = 0.0;
    for (double w : weights) {
        if (!(w >= 0.0)) throw Error("estimate_component: negative weight");
        total_weight += w;
    }
    const auto n_cache = static_cast<std::size_t>(std::ceil(domain_len / grid_step - 1e-9)) + 1;
    curve.cache.lo = 0.0;
    curve.cache.hi = domain_len;
    curve.cache.values.assign(std::max<std::size_t>(n_cache, 2), 1.0);
    if (total_weight <= 0.0) {
        curve.degenerate = true;
        curve.norm = 1.0;
        return curve;
    }

    // Per-point masses (analytic) shared across the grid sweep.
    const std::size_t n_pts = centers.size();
    std::vector<double> c0(n_pts), c1(n_pts), c2(n_pts), inv_mass(n_pts);
    for (std::size_t i = 0; i < n_pts; ++i) {
        if (periodic) {
            double c = std::fmod(centers[i], domain_len);
            if (c < 0.0) c += domain_len;
            c0[i] = c;
            c1[i] = c - domain_len;
            c2[i] = c + domain_len;
            const double mass = gaussian_mass(c0[i], omega, 0.0, domain_len) +
                                gaussian_mass(c1[i], omega, 0.0, domain_len) +
                                gaussian_mass(c2[i], omega, 0.0, domain_len);
            inv_mass[i] = 1.0 / mass;
        } else {
            c0[i] = centers[i];
            c1[i] = -centers[i];                    // mirror at 0
            c2[i] = 2.0 * domain_len - centers[i];  // mirror at T
            const double mass = truncated_mass(centers[i], omega, 0.0, domain_len, true, true);
            inv_mass[i] = 1.0 / mass;
        }
    }

    const EstimationGrid grid = pick_grid(domain_len, omega, grid_step);
    std::vector<double> raw(grid.n, 0.0);
    const double inv2w2 = 1.0 / (2.0 * omega * omega);
    const double norm_k = 0.3989422804014326779 / omega;
    for (std::size_t m = 0; m < grid.n; ++m) {
        const double u = grid.step * static_cast<double>(m);
        double acc = 0.0;
        for (std::size_t i = 0; i < n_pts; ++i) {
            const double w = weights[i];
            if (w == 0.0) continue;
            const double d0 = u - c0[i];
            const double d1 = u - c1[i];
            const double d2 = u - c2[i];
            const double k = std::exp(-d0 * d0 * inv2w2) + std::exp(-d1 * d1 * inv2w2) +
                             std::exp(-d2 * d2 * inv2w2);
            acc += w * k * inv_mass[i];
        }
        raw[m] = acc * norm_k;
    }
    if (periodic) raw.back() = raw.front();

    // Fill the cache from the estimation grid, then pin the mean to 1.
    auto& cv = curve.cache.values;
    const double cache_step = curve.cache.step();
    for (std::size_t m = 0; m < cv.size(); ++m) {
        const double u = cache_step * static_cast<double>(m);
        const double s = u / grid.step;
        std::size_t i = static_cast<std::size_t>(s);
        if (i >= grid.n - 1) i = grid.n - 2;
        const double frac = s - static_cast<double>(i);
        cv[m] = raw[i] + frac * (raw[i + 1] - raw[i]);
    }
    if (periodic) cv.back() = cv.front();
    const double mean = curve.cache.trapezoid() / domain_len;
    if (!(mean > 0.0)) throw Error("estimate_component: estimate integrates to zero");
    for (double& v : cv) v /= mean;
    curve.norm = mean;
    return curve;
}

ComponentCurve estimate_periodic_component(const EventCatalog& catalog,
                                           std::span<const double> weights, double period,
                                           double omega, double grid_step, CurveAxis axis) {
    if (weights.size() != catalog.size())
        throw Error("estimate_periodic_component: weight count must match event count");
    std::vector<double> phases(catalog.size());
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        double p = std::fmod(catalog.events[i].t + catalog.anchor_min, period);
        if (p < 0.0) p += period;
        phases[i] = p;
    }
    return estimate_component(phases, weights, period, true, omega, grid_step, axis);
}

ComponentCurve estimate_trend(const EventCatalog& catalog, std::span<const double> weights,
                              double t_len, double omega, double grid_step) {
    if (weights.size() != catalog.size())
        throw Error("estimate_trend: weight count must match event count");
    std::vector<double> times(catalog.size());
    for (std::size_t i = 0; i < catalog.size(); ++i) times[i] = catalog.events[i].t;
    return estimate_component(times, weights, t_len, false, omega, grid_step, CurveAxis::trend);
}

ComponentCurve estimate_spatial(const EventCatalog& catalog, std::span<const double> psi,
                                double x_len, double omega, double grid_step, bool ring) {
    if (psi.size() != catalog.size())
        throw Error("estimate_spatial: weight count must match event count");
    std::vector<double> xs(catalog.size());
    for (std::size_t i = 0; i < catalog.size(); ++i) xs[i] = catalog.events[i].x;
    return estimate_component(xs, psi, x_len, ring, omega, grid_step, CurveAxis::spatial);
}

BackgroundWeights compute_background_weights(const EventCatalog& catalog,
                                             const ModelComponents& model) {
    const std::size_t n = catalog.size();
    BackgroundWeights out;
    out.w_d.resize(n);
    out.w_w.resize(n);
    out.w_t.resize(n);
    out.psi.resize(n);
    std::span<const Event> events(catalog.events);
    for (std::size_t i = 0; i < n; ++i) {
        const Event& e = catalog.events[i];
        const double d = model.daily_at(e.t);
        const double w = model.weekly_at(e.t);
        const double tr = model.trend_at(e.t);
        const double s = model.spatial_at(e.x);
        const double bg = model.mu0 * d * w * tr * s;
        const double trig = model.enabled.triggering && model.branching > 0.0
                                ? model.branching * model.triggering_sum(e.t, e.x, events.first(i))
                                : 0.0;
        const double lambda = bg + trig;
        if (!(lambda > 0.0))
            throw Error("compute_background_weights: intensity vanishes at event " +
                        std::to_string(i));
        out.w_d[i] = d * s / lambda;
        out.w_w[i] = w * s / lambda;
        out.w_t[i] = tr * s / lambda;
        out.psi[i] = bg / lambda;
    }
    // The w vectors are only defined up to scale; pin them into [0, 1].
    for (auto* v : {&out.w_d, &out.w_w, &out.w_t}) {
        double m = 0.0;
        for (double w : *v) m = std::max(m, w);
        if (m > 0.0)
            for (double& w : *v) w /= m;
    }
    return out;
}

} // namespace roadhawk
