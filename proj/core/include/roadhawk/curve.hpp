#pragma once

#include "roadhawk/kernels.hpp"

#include <functional>
#include <string>
#include <vector>

namespace roadhawk {

// Uniform-grid piecewise-linear function; the canonical evaluated form of
// every estimated curve.
struct PiecewiseLinear {
    double lo = 0.0;
    double hi = 1.0;
    std::vector<double> values;

    double step() const { return (hi - lo) / static_cast<double>(values.size() - 1); }
    std::size_t size() const { return values.size(); }
    double coord(std::size_t i) const { return lo + step() * static_cast<double>(i); }

    // Linear interpolation, clamped to [lo, hi].
    double at(double u) const;
    double max_value() const;
    double trapezoid() const;
    // Running trapezoid integral from lo, one entry per grid point.
    std::vector<double> prefix_integral() const;
};

enum class CurveAxis { daily, weekly, trend, spatial };

std::string axis_name(CurveAxis axis);

// A weighted kernel mixture over event coordinates, normalized to mean 1
// over its domain and cached on a uniform grid.
struct ComponentCurve {
    CurveAxis axis = CurveAxis::daily;
    KernelSpec kernel;
    std::vector<double> centers;
    std::vector<double> weights;
    double domain_len = 0.0;
    bool periodic = false;
    double norm = 1.0;        // divisor that produced the mean-1 cache
    bool degenerate = false;  // all-zero weights; curve pinned to 1
    PiecewiseLinear cache;

    // Wraps onto [0, period) for periodic axes, clamps otherwise.
    double value(double coord) const;
    double mean() const { return cache.trapezoid() / domain_len; }
};

// Triggering density on [0, horizon]: mirrored-at-zero kernel mixture over
// pair lags, each term renormalized over its own admissible range, divided
// by the repetition count and scaled to unit integral.
struct TriggerCurve {
    double horizon = 0.0;
    double bandwidth = 0.0;
    std::vector<double> centers;       // pair lags
    std::vector<double> weights;       // rho values (monotone-adjusted when enabled)
    std::vector<double> upper_limits;  // per-pair admissible range
    double norm = 1.0;                 // unit-integral divisor
    bool no_evidence = false;
    bool monotone_adjusted = false;
    PiecewiseLinear cache;
    std::vector<double> cumulative;    // prefix integral of cache

    double value(double lag) const;        // 0 outside [0, horizon]
    double integral_to(double lag) const;  // clamped at the horizon
};

// Analytically specified curves for simulation fixtures; shape is sampled
// onto the grid and normalized (mean 1, or unit integral for triggering).
ComponentCurve make_component_from_function(CurveAxis axis, const std::function<double(double)>& f,
                                            double domain_len, bool periodic, double grid_step,
                                            double bandwidth_hint = 1.0);
TriggerCurve make_trigger_from_function(const std::function<double(double)>& f, double horizon,
                                        double grid_step);

ComponentCurve make_flat_component(CurveAxis axis, double domain_len, bool periodic,
                                   double grid_step);
TriggerCurve make_flat_trigger(double horizon, double grid_step);

} // namespace roadhawk
