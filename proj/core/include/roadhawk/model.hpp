#pragma once

#include "roadhawk/catalog.hpp"
#include "roadhawk/curve.hpp"

#include <span>

namespace roadhawk {

struct ComponentFlags {
    bool daily = true;
    bool weekly = true;
    bool trend = true;
    bool spatial = true;
    bool triggering = true;
};

// The fitted model: lambda(t, x) = mu0 * mu_d * mu_w * mu_t * mu_s
//                                  + A * sum_{t_i < t, x_i > x} g(t - t_i) h(x_i - x).
// Disabled components evaluate to exactly 1 (0 for triggering).
struct ModelComponents {
    double mu0 = 0.0;        // events / minute / meter
    double branching = 0.0;  // A, expected triggered fraction
    ComponentCurve mu_d, mu_w, mu_t, mu_s;
    TriggerCurve g, h;
    ComponentFlags enabled;
    StudyDomain domain;
    double anchor_min = 0.0;
    FitConfig config;

    double daily_at(double t) const;
    double weekly_at(double t) const;
    double trend_at(double t) const;
    double spatial_at(double x) const;

    // Product of the enabled modulation curves (no mu0).
    double modulation_at(double t, double x) const;
    double background_at(double t, double x) const { return mu0 * modulation_at(t, x); }

    // sum g(t - t_i) h(x_i - x) over upstream history within the horizons.
    // `history` must be time-sorted; only events with t_i < t contribute.
    double triggering_sum(double t, double x, std::span<const Event> history) const;

    double intensity(double t, double x, std::span<const Event> history) const;
};

double intensity(const ModelComponents& model, double t, double x,
                 std::span<const Event> history);

} // namespace roadhawk
