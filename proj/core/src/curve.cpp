#include "roadhawk/curve.hpp"

#include "roadhawk/catalog.hpp"

#include <algorithm>
#include <cmath>

namespace roadhawk {

double PiecewiseLinear::at(double u) const {
    if (values.empty()) return 0.0;
    if (values.size() == 1) return values.front();
    if (u <= lo) return values.front();
    if (u >= hi) return values.back();
    const double h = step();
    const double s = (u - lo) / h;
    std::size_t i = static_cast<std::size_t>(s);
    if (i >= values.size() - 1) i = values.size() - 2;
    const double frac = s - static_cast<double>(i);
    return values[i] + frac * (values[i + 1] - values[i]);
}

double PiecewiseLinear::max_value() const {
    double m = values.empty() ? 0.0 : values.front();
    for (double v : values) m = std::max(m, v);
    return m;
}

double PiecewiseLinear::trapezoid() const {
    if (values.size() < 2) return 0.0;
    double sum = 0.5 * (values.front() + values.back());
    for (std::size_t i = 1; i + 1 < values.size(); ++i) sum += values[i];
    return sum * step();
}

std::vector<double> PiecewiseLinear::prefix_integral() const {
    std::vector<double> out(values.size(), 0.0);
    const double h = step();
    for (std::size_t i = 1; i < values.size(); ++i)
        out[i] = out[i - 1] + 0.5 * h * (values[i - 1] + values[i]);
    return out;
}

std::string axis_name(CurveAxis axis) {
    switch (axis) {
    case CurveAxis::daily: return "daily";
    case CurveAxis::weekly: return "weekly";
    case CurveAxis::trend: return "trend";
    case CurveAxis::spatial: return "spatial";
    }
    return "?";
}

double ComponentCurve::value(double coord) const {
    if (degenerate || cache.values.empty()) return 1.0;
    if (periodic) {
        double p = std::fmod(coord, domain_len);
        if (p < 0.0) p += domain_len;
        return cache.at(p);
    }
    return cache.at(coord);
}

double TriggerCurve::value(double lag) const {
    if (no_evidence || cache.values.empty()) return 0.0;
    if (lag < 0.0 || lag > horizon) return 0.0;
    return cache.at(lag);
}

double TriggerCurve::integral_to(double lag) const {
    if (no_evidence || cumulative.empty()) return 0.0;
    if (lag <= 0.0) return 0.0;
    if (lag >= horizon) return cumulative.back();
    const double h = cache.step();
    const double s = lag / h;
    std::size_t i = static_cast<std::size_t>(s);
    if (i >= cumulative.size() - 1) return cumulative.back();
    const double frac = s - static_cast<double>(i);
    // quadratic within the cell: integral of the linear density segment
    const double v0 = cache.values[i];
    const double v1 = cache.values[i + 1];
    const double dt = frac * h;
    return cumulative[i] + v0 * dt + 0.5 * (v1 - v0) * frac * dt;
}

namespace {

PiecewiseLinear sample_on_grid(const std::function<double(double)>& f, double lo, double hi,
                               double grid_step) {
    if (!(hi > lo) || !(grid_step > 0.0)) throw Error("curve grid: bad domain or step");
    const auto n = static_cast<std::size_t>(std::ceil((hi - lo) / grid_step - 1e-9)) + 1;
    PiecewiseLinear g;
    g.lo = lo;
    g.hi = hi;
    g.values.resize(std::max<std::size_t>(n, 2));
    const double h = (hi - lo) / static_cast<double>(g.values.size() - 1);
    for (std::size_t i = 0; i < g.values.size(); ++i) {
        double v = f(lo + h * static_cast<double>(i));
        if (!(v >= 0.0)) throw Error("curve grid: negative or NaN shape value");
        g.values[i] = v;
    }
    return g;
}

} // namespace

ComponentCurve make_component_from_function(CurveAxis axis, const std::function<double(double)>& f,
                                            double domain_len, bool periodic, double grid_step,
                                            double bandwidth_hint) {
    ComponentCurve c;
    c.axis = axis;
    c.domain_len = domain_len;
    c.periodic = periodic;
    c.kernel.bandwidth = bandwidth_hint;
    c.kernel.kind = periodic ? DomainKind::periodic : DomainKind::truncated;
    if (periodic) {
        c.kernel.period = domain_len;
    } else {
        c.kernel.lo = 0.0;
        c.kernel.hi = domain_len;
        c.kernel.mirror_lo = c.kernel.mirror_hi = true;
    }
    c.cache = sample_on_grid(f, 0.0, domain_len, grid_step);
    if (periodic) c.cache.values.back() = c.cache.values.front();
    const double mean = c.cache.trapezoid() / domain_len;
    if (!(mean > 0.0)) throw Error("component curve: shape integrates to zero");
    for (double& v : c.cache.values) v /= mean;
    c.norm = mean;
    return c;
}

TriggerCurve make_trigger_from_function(const std::function<double(double)>& f, double horizon,
                                        double grid_step) {
    TriggerCurve c;
    c.horizon = horizon;
    c.bandwidth = grid_step;
    c.cache = sample_on_grid(f, 0.0, horizon, grid_step);
    const double total = c.cache.trapezoid();
    if (!(total > 0.0)) throw Error("trigger curve: shape integrates to zero");
    for (double& v : c.cache.values) v /= total;
    c.norm = total;
    c.cumulative = c.cache.prefix_integral();
    return c;
}

ComponentCurve make_flat_component(CurveAxis axis, double domain_len, bool periodic,
                                   double grid_step) {
    return make_component_from_function(
        axis, [](double) { return 1.0; }, domain_len, periodic, grid_step);
}

TriggerCurve make_flat_trigger(double horizon, double grid_step) {
    return make_trigger_from_function([](double) { return 1.0; }, horizon, grid_step);
}

} // namespace roadhawk
