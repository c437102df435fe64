#include "roadhawk/fitter.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>

namespace roadhawk {

BackgroundIntegral integrate_background(const ModelComponents& model, double t_len,
                                        double anchor_min, double grid_dt, double x_len,
                                        double grid_dx) {
    BackgroundIntegral out;
    const auto n = static_cast<std::size_t>(std::ceil(t_len / grid_dt - 1e-9)) + 1;
    out.modulation.lo = 0.0;
    out.modulation.hi = t_len;
    out.modulation.values.resize(std::max<std::size_t>(n, 2));
    const double step = t_len / static_cast<double>(out.modulation.values.size() - 1);
    const double day = model.domain.day_min;
    const double week = model.domain.week_min;
    for (std::size_t m = 0; m < out.modulation.values.size(); ++m) {
        const double t = step * static_cast<double>(m);
        double v = 1.0;
        if (model.enabled.daily) {
            double p = std::fmod(t + anchor_min, day);
            if (p < 0.0) p += day;
            v *= model.mu_d.value(p);
        }
        if (model.enabled.weekly) {
            double p = std::fmod(t + anchor_min, week);
            if (p < 0.0) p += week;
            v *= model.mu_w.value(p);
        }
        if (model.enabled.trend) v *= model.mu_t.value(t);
        out.modulation.values[m] = v;
    }
    out.prefix = out.modulation.prefix_integral();

    if (model.enabled.spatial) {
        const auto nx = static_cast<std::size_t>(std::ceil(x_len / grid_dx - 1e-9)) + 1;
        const double sx = x_len / static_cast<double>(std::max<std::size_t>(nx, 2) - 1);
        double acc = 0.0;
        double prev = model.mu_s.value(0.0);
        for (std::size_t m = 1; m < std::max<std::size_t>(nx, 2); ++m) {
            const double cur = model.mu_s.value(sx * static_cast<double>(m));
            acc += 0.5 * sx * (prev + cur);
            prev = cur;
        }
        out.spatial_integral = acc;
    } else {
        out.spatial_integral = x_len;
    }
    return out;
}

UG compute_U_G(const ModelComponents& model, const EventCatalog& catalog) {
    const auto& dom = catalog.domain;
    BackgroundIntegral bg = integrate_background(model, dom.t_len, catalog.anchor_min,
                                                 model.config.grid_dt, dom.x_len,
                                                 model.config.grid_dx);
    UG out;
    out.U = bg.prefix.back() * bg.spatial_integral;
    if (model.enabled.triggering) {
        const double ht = model.config.trigger_horizon_t;
        const double hx = model.config.trigger_horizon_x;
        for (const Event& e : catalog.events) {
            const double gt = model.g.integral_to(std::min(ht, dom.t_len - e.t));
            const double hxv = model.h.integral_to(std::min(hx, e.x));
            out.G += gt * hxv;
        }
    }
    return out;
}

RateUpdate update_A_mu0(double sum_psi, double G, double U, std::size_t n_events) {
    if (!(U > 0.0)) throw Error("update_A_mu0: U must be positive");
    const double n = static_cast<double>(n_events);
    RateUpdate out;
    const double excess = n - sum_psi;
    if (G > 0.0) {
        out.branching = excess / G;
    } else {
        if (std::abs(excess) > 1e-9 * std::max(1.0, n))
            throw Error("update_A_mu0: zero triggering mass with non-background events");
        out.branching = 0.0;
    }
    if (out.branching < 0.0) out.branching = 0.0;
    if (out.branching >= 0.99) out.saturated = true;
    out.mu0 = (n - out.branching * G) / U;
    return out;
}

double log_likelihood(const ModelComponents& model, const EventCatalog& catalog) {
    std::span<const Event> events(catalog.events);
    double sum_log = 0.0;
    for (std::size_t i = 0; i < events.size(); ++i) {
        const double lambda = model.intensity(events[i].t, events[i].x, events.first(i));
        if (!(lambda > 0.0)) return -std::numeric_limits<double>::infinity();
        sum_log += std::log(lambda);
    }
    UG ug = compute_U_G(model, catalog);
    return sum_log - model.mu0 * ug.U - model.branching * ug.G;
}

double homogeneous_log_likelihood(const EventCatalog& catalog) {
    const double n = static_cast<double>(catalog.size());
    const double rate = n / (catalog.domain.t_len * catalog.domain.x_len);
    return n * std::log(rate) - n;
}

namespace {

ModelComponents initial_model(const EventCatalog& catalog, const FitConfig& config,
                              const ComponentFlags& flags) {
    ModelComponents model;
    model.domain = catalog.domain;
    model.anchor_min = catalog.anchor_min;
    model.config = config;
    model.enabled = flags;
    const auto& dom = catalog.domain;
    model.mu_d = make_flat_component(CurveAxis::daily, dom.day_min, true, config.grid_dt);
    model.mu_w = make_flat_component(CurveAxis::weekly, dom.week_min, true, config.grid_dt);
    model.mu_t = make_flat_component(CurveAxis::trend, dom.t_len, false, config.grid_dt);
    model.mu_s = make_flat_component(CurveAxis::spatial, dom.x_len, dom.spatial_ring,
                                     config.grid_dx);
    model.g = make_flat_trigger(config.trigger_horizon_t, config.grid_dt);
    model.h = make_flat_trigger(config.trigger_horizon_x, config.grid_dx);
    model.branching = flags.triggering ? config.init_branching : 0.0;
    model.mu0 = static_cast<double>(catalog.size()) / (dom.t_len * dom.x_len);
    return model;
}

} // namespace

std::pair<ModelComponents, FitReport> fit(const EventCatalog& catalog, const FitConfig& config,
                                          const ComponentFlags& flags) {
    const auto t_start = std::chrono::steady_clock::now();
    catalog.validate();
    config.validate();
    const std::size_t n = catalog.size();
    if (n < 10) throw Error("fit: refusing to fit fewer than 10 events");

    ModelComponents model = initial_model(catalog, config, flags);
    FitReport report;
    report.loglik_homogeneous = homogeneous_log_likelihood(catalog);

    PairSet pairs;
    if (flags.triggering) {
        pairs = enumerate_pairs(catalog, config.trigger_horizon_t, config.trigger_horizon_x);
        if (pairs.pairs.empty()) report.no_triggering_evidence = true;
    }
    const std::optional<MonotoneSettings> mono{MonotoneSettings{config.mono_epsilon}};

    std::vector<double> prev_psi(n, 1.0);
    double prev_a = model.branching;
    double prev_mu0 = model.mu0;

    for (int iter = 0; iter < config.max_iters; ++iter) {
        BackgroundWeights weights = compute_background_weights(catalog, model);
        double max_partition = 0.0;
        if (flags.triggering && !pairs.pairs.empty()) {
            compute_rho(pairs, catalog, model);
            for (std::size_t j = 0; j < n; ++j) {
                double sum = weights.psi[j];
                for (std::size_t k = pairs.target_begin[j]; k < pairs.target_begin[j + 1]; ++k)
                    sum += pairs.pairs[k].rho;
                max_partition = std::max(max_partition, std::abs(sum - 1.0));
            }
        }

        if (flags.daily)
            model.mu_d = estimate_periodic_component(catalog, weights.w_d, catalog.domain.day_min,
                                                     config.bw_daily, config.grid_dt,
                                                     CurveAxis::daily);
        if (flags.weekly)
            model.mu_w = estimate_periodic_component(catalog, weights.w_w, catalog.domain.week_min,
                                                     config.bw_weekly, config.grid_dt,
                                                     CurveAxis::weekly);
        if (flags.trend)
            model.mu_t = estimate_trend(catalog, weights.w_t, catalog.domain.t_len,
                                        config.bw_trend, config.grid_dt);
        if (flags.spatial)
            model.mu_s = estimate_spatial(catalog, weights.psi, catalog.domain.x_len,
                                          config.bw_spatial, config.grid_dx,
                                          catalog.domain.spatial_ring);
        if (flags.triggering && !pairs.pairs.empty()) {
            model.g = estimate_g(pairs, catalog, config.bw_g, config.trigger_horizon_t,
                                 config.grid_dt, mono);
            model.h = estimate_h(pairs, catalog, config.bw_h, config.trigger_horizon_x,
                                 config.grid_dx, mono);
        }

        UG ug = compute_U_G(model, catalog);
        double sum_psi = 0.0;
        for (double v : weights.psi) sum_psi += v;
        RateUpdate upd = update_A_mu0(sum_psi, flags.triggering ? ug.G : 0.0, ug.U, n);
        if (upd.saturated)
            throw Error("fit: branching ratio reached the subcritical bound (A >= 0.99)");
        model.branching = flags.triggering ? upd.branching : 0.0;
        model.mu0 = upd.mu0;

        double max_dpsi = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            max_dpsi = std::max(max_dpsi, std::abs(weights.psi[j] - prev_psi[j]));
        prev_psi = weights.psi;

        FitIteration row;
        row.branching = model.branching;
        row.mu0 = model.mu0;
        row.loglik = log_likelihood(model, catalog);
        row.max_dpsi = max_dpsi;
        row.max_partition_residual = max_partition;
        report.iterations.push_back(row);

        const double da = std::abs(model.branching - prev_a) / std::max(std::abs(prev_a), 1e-12);
        const double dmu = std::abs(model.mu0 - prev_mu0) / std::max(std::abs(prev_mu0), 1e-12);
        prev_a = model.branching;
        prev_mu0 = model.mu0;
        if (iter > 0 && max_dpsi < config.tol && da < config.tol && dmu < config.tol) {
            report.converged = true;
            break;
        }
    }

    report.loglik = report.iterations.empty() ? -std::numeric_limits<double>::infinity()
                                              : report.iterations.back().loglik;
    report.seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return {std::move(model), std::move(report)};
}

std::vector<Hotspot> extract_hotspots(const ComponentCurve& mu_s, bool ring) {
    std::vector<Hotspot> out;
    const auto& v = mu_s.cache.values;
    if (v.size() < 2) return out;
    const double step = mu_s.cache.step();
    const double x_len = mu_s.cache.hi;

    auto cross = [&](std::size_t lo_idx, std::size_t hi_idx) {
        // linear crossing of level 1 between grid points lo_idx < hi_idx
        const double v0 = v[lo_idx];
        const double v1 = v[hi_idx];
        const double frac = (1.0 - v0) / (v1 - v0);
        return step * (static_cast<double>(lo_idx) + frac);
    };

    bool inside = v[0] > 1.0;
    double start = 0.0;
    for (std::size_t m = 1; m < v.size(); ++m) {
        const bool above = v[m] > 1.0;
        if (!inside && above) {
            start = v[m - 1] > 1.0 ? step * static_cast<double>(m - 1) : cross(m - 1, m);
            inside = true;
        } else if (inside && !above) {
            out.push_back({start, cross(m - 1, m)});
            inside = false;
        }
    }
    if (inside) out.push_back({start, x_len});

    if (ring && out.size() >= 2 && out.front().start_m == 0.0 &&
        out.back().end_m == x_len) {
        Hotspot merged{out.back().start_m, out.front().end_m};
        out.erase(out.begin());
        out.pop_back();
        out.push_back(merged);
    }
    return out;
}

} // namespace roadhawk
