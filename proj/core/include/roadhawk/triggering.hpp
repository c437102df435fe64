#pragma once

#include "roadhawk/model.hpp"

#include <optional>
#include <vector>

namespace roadhawk {

// One admissible (cause, target) pair: t_cause < t_target, x_cause > x_target,
// lags within the configured horizons.
struct EventPair {
    std::size_t cause = 0;
    std::size_t target = 0;
    double dt = 0.0;     // t_target - t_cause, minutes
    double dx_up = 0.0;  // x_cause - x_target, meters (upstream distance)
    double rho = 0.0;
};

// Pairs in target-major order (then ascending cause); target_begin[j] indexes
// the slice of pairs whose target is event j, for partition checks.
struct PairSet {
    std::vector<EventPair> pairs;
    std::vector<std::size_t> target_begin; // size N + 1

    std::size_t size() const { return pairs.size(); }
};

PairSet enumerate_pairs(const EventCatalog& catalog, double horizon_t, double horizon_x);

// rho_{i,j} = A g(dt) h(dx_up) / lambda(t_j, x_j). Throws if the intensity
// vanishes at a receiving event.
void compute_rho(PairSet& pairs, const EventCatalog& catalog, const ModelComponents& model);

struct MonotoneSettings {
    double epsilon = 0.0;
};

// Smoothed temporal triggering density on [0, horizon]: mirrored at zero,
// each pair's kernel renormalized over [0, min(horizon, T - t_cause)],
// divided per grid point by the repetition count #{i : t_i + t <= T},
// then scaled to unit integral. Optional monotone adjustment reweights the
// pairs before the final normalization.
TriggerCurve estimate_g(const PairSet& pairs, const EventCatalog& catalog, double omega,
                        double horizon, double grid_step,
                        const std::optional<MonotoneSettings>& monotone = std::nullopt);

// Spatial counterpart on upstream distance; per-pair range [0, min(horizon,
// x_cause)], repetition count #{i : x_i >= x}.
TriggerCurve estimate_h(const PairSet& pairs, const EventCatalog& catalog, double omega,
                        double horizon, double grid_step,
                        const std::optional<MonotoneSettings>& monotone = std::nullopt);

} // namespace roadhawk
