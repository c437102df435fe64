#include "roadhawk/model.hpp"

#include <algorithm>
#include <cmath>

namespace roadhawk {

double ModelComponents::daily_at(double t) const {
    if (!enabled.daily) return 1.0;
    double p = std::fmod(t + anchor_min, domain.day_min);
    if (p < 0.0) p += domain.day_min;
    return mu_d.value(p);
}

double ModelComponents::weekly_at(double t) const {
    if (!enabled.weekly) return 1.0;
    double p = std::fmod(t + anchor_min, domain.week_min);
    if (p < 0.0) p += domain.week_min;
    return mu_w.value(p);
}

double ModelComponents::trend_at(double t) const {
    if (!enabled.trend) return 1.0;
    return mu_t.value(t);
}

double ModelComponents::spatial_at(double x) const {
    if (!enabled.spatial) return 1.0;
    return mu_s.value(x);
}

double ModelComponents::modulation_at(double t, double x) const {
    return daily_at(t) * weekly_at(t) * trend_at(t) * spatial_at(x);
}

double ModelComponents::triggering_sum(double t, double x, std::span<const Event> history) const {
    if (!enabled.triggering) return 0.0;
    const double horizon_t = config.trigger_horizon_t;
    const double horizon_x = config.trigger_horizon_x;
    // events with t_i in [t - horizon_t, t)
    auto lower = std::lower_bound(history.begin(), history.end(), t - horizon_t,
                                  [](const Event& e, double v) { return e.t < v; });
    double sum = 0.0;
    for (auto it = lower; it != history.end() && it->t < t; ++it) {
        const double dx_up = it->x - x;
        if (dx_up <= 0.0 || dx_up > horizon_x) continue;
        sum += g.value(t - it->t) * h.value(dx_up);
    }
    return sum;
}

double ModelComponents::intensity(double t, double x, std::span<const Event> history) const {
    double v = background_at(t, x);
    if (enabled.triggering && branching > 0.0)
        v += branching * triggering_sum(t, x, history);
    return v;
}

double intensity(const ModelComponents& model, double t, double x,
                 std::span<const Event> history) {
    return model.intensity(t, x, history);
}

} // namespace roadhawk
