#pragma once

#include "roadhawk/model.hpp"

#include <span>
#include <vector>

namespace roadhawk {

// Per-event estimation weights. psi is the background probability of each
// event; w_d / w_w / w_t drive the daily, weekly and trend estimators and
// are stored rescaled by their maximum so every entry lies in [0, 1]
// (the estimators only use them up to proportionality).
struct BackgroundWeights {
    std::vector<double> w_d, w_w, w_t, psi;
};

BackgroundWeights compute_background_weights(const EventCatalog& catalog,
                                             const ModelComponents& model);

// curve(x) proportional to sum_i weight_i * periodic point weight at
// (center_i mod period), then normalized to mean 1 over [0, period).
// All-zero weights yield a flat curve flagged degenerate.
ComponentCurve estimate_periodic_component(const EventCatalog& catalog,
                                           std::span<const double> weights, double period,
                                           double omega, double grid_step, CurveAxis axis);

// Truncated domain [0, T] with mirrored correction at both ends.
ComponentCurve estimate_trend(const EventCatalog& catalog, std::span<const double> weights,
                              double t_len, double omega, double grid_step);

// Periodic with period X when ring is set, truncated-mirrored otherwise.
ComponentCurve estimate_spatial(const EventCatalog& catalog, std::span<const double> psi,
                                double x_len, double omega, double grid_step, bool ring);

// Low-level estimator over explicit axis coordinates (used by the above).
ComponentCurve estimate_component(std::span<const double> centers, std::span<const double> weights,
                                  double domain_len, bool periodic, double omega, double grid_step,
                                  CurveAxis axis);

} // namespace roadhawk
