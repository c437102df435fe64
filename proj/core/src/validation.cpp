#include "roadhawk/validation.hpp"

#include "roadhawk/fitter.hpp"
#include "roadhawk/special_functions.hpp"

#include <algorithm>
#include <cmath>

namespace roadhawk {

std::vector<double> transform_times(const ModelComponents& model, const EventCatalog& catalog) {
    const auto& dom = catalog.domain;
    BackgroundIntegral bg = integrate_background(model, dom.t_len, catalog.anchor_min,
                                                 model.config.grid_dt, dom.x_len,
                                                 model.config.grid_dx);
    const double step = bg.modulation.step();
    auto background_cum = [&](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= dom.t_len) return bg.prefix.back();
        const double s = t / step;
        std::size_t i = static_cast<std::size_t>(s);
        if (i >= bg.prefix.size() - 1) return bg.prefix.back();
        const double frac = s - static_cast<double>(i);
        const double dt = frac * step;
        const double v0 = bg.modulation.values[i];
        const double v1 = bg.modulation.values[i + 1];
        return bg.prefix[i] + v0 * dt + 0.5 * (v1 - v0) * frac * dt;
    };

    const double ht = model.config.trigger_horizon_t;
    const double hx = model.config.trigger_horizon_x;
    const bool trig = model.enabled.triggering && model.branching > 0.0;

    // Per-parent spatial mass, fixed once.
    std::vector<double> h_mass;
    if (trig) {
        h_mass.resize(catalog.size());
        for (std::size_t j = 0; j < catalog.size(); ++j)
            h_mass[j] = model.h.integral_to(std::min(hx, catalog.events[j].x));
    }

    std::vector<double> lambda_seq(catalog.size(), 0.0);
    for (std::size_t i = 0; i < catalog.size(); ++i) {
        const double t = catalog.events[i].t;
        double v = model.mu0 * background_cum(t) * bg.spatial_integral;
        if (trig) {
            for (std::size_t j = 0; j < i; ++j) {
                const double dt = t - catalog.events[j].t;
                if (dt <= 0.0) continue;
                v += model.branching * model.g.integral_to(std::min(dt, ht)) * h_mass[j];
            }
        }
        lambda_seq[i] = v;
    }
    return lambda_seq;
}

std::vector<double> to_uniform(const std::vector<double>& transformed) {
    std::vector<double> z(transformed.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < transformed.size(); ++i) {
        const double inc = transformed[i] - prev;
        if (inc < 0.0) throw Error("to_uniform: negative increment at index " + std::to_string(i));
        z[i] = -std::expm1(-inc);
        prev = transformed[i];
    }
    return z;
}

double ks_band(std::size_t n, double alpha) {
    if (n < 1) throw Error("ks_band: n must be at least 1");
    return kolmogorov_critical(alpha) / std::sqrt(static_cast<double>(n));
}

std::pair<double, double> qq_band(std::size_t n, std::size_t k, double alpha) {
    if (k < 1 || k > n) throw Error("qq_band: order statistic index out of range");
    const double a = static_cast<double>(k);
    const double b = static_cast<double>(n + 1 - k);
    return {beta_quantile(a, b, 0.5 * alpha), beta_quantile(a, b, 1.0 - 0.5 * alpha)};
}

double ks_statistic_uniform(std::vector<double> values) {
    std::sort(values.begin(), values.end());
    const double n = static_cast<double>(values.size());
    double d = 0.0;
    for (std::size_t i = 0; i < values.size(); ++i) {
        const double hi = static_cast<double>(i + 1) / n - values[i];
        const double lo = values[i] - static_cast<double>(i) / n;
        d = std::max(d, std::max(hi, lo));
    }
    return d;
}

ValidationReport validate(const ModelComponents& model, const EventCatalog& catalog,
                          ValidationMode mode) {
    if (mode == ValidationMode::out_of_sample && model.enabled.trend)
        throw Error("validate: out-of-sample validation requires the trend to be disabled");
    ValidationReport report;
    report.mode = mode;
    report.transformed = transform_times(model, catalog);
    report.z = to_uniform(report.transformed);
    report.increments.resize(report.transformed.size());
    double prev = 0.0;
    for (std::size_t i = 0; i < report.transformed.size(); ++i) {
        report.increments[i] = report.transformed[i] - prev;
        prev = report.transformed[i];
    }

    const std::size_t n = report.z.size();
    report.small_n = n < 35;
    report.ks_stat = ks_statistic_uniform(report.z);
    report.band95 = ks_band(n, 0.05);
    report.band99 = ks_band(n, 0.01);
    report.pass95 = report.ks_stat <= report.band95;
    report.pass99 = report.ks_stat <= report.band99;

    std::vector<double> sorted(report.z);
    std::sort(sorted.begin(), sorted.end());
    report.qq.resize(n);
    for (std::size_t k = 1; k <= n; ++k) {
        QQPoint& q = report.qq[k - 1];
        q.k = k;
        q.observed = sorted[k - 1];
        q.expected = static_cast<double>(k) / static_cast<double>(n + 1);
        auto [lo, hi] = qq_band(n, k, 0.05);
        q.lo = lo;
        q.hi = hi;
        if (q.observed < lo || q.observed > hi) ++report.qq_outside95;
    }
    return report;
}

} // namespace roadhawk
