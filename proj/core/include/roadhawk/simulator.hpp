#pragma once

#include "roadhawk/model.hpp"

#include <cstdint>
#include <vector>

namespace roadhawk {

// Counter-based generator; child streams are keyed by the event path through
// the branching tree, so subtree sampling order never changes the draws.
struct RngStream {
    std::uint64_t key = 0;
    std::uint64_t counter = 0;

    static RngStream root(std::uint64_t seed);
    RngStream child(std::uint64_t index) const;

    std::uint64_t next_u64();
    double next_double(); // uniform [0, 1)
    double next_exponential();
    std::uint64_t next_poisson(double mean);
};

struct SimSpec {
    ModelComponents model;
    StudyDomain domain;
    double anchor_min = 0.0;
    std::uint64_t seed = 0;
    int max_generations = 50;
};

SimSpec make_sim_spec(const ModelComponents& model, std::uint64_t seed);

// Inverse-CDF draw from a cached density; exact for the piecewise-linear form.
double sample_from_cache(const PiecewiseLinear& density, const std::vector<double>& cumulative,
                         double u);

// Inhomogeneous Poisson draw of the background by thinning against the
// product of the cached curve maxima. Sorted by (t, x).
std::vector<Event> sample_background(const SimSpec& spec);

// Children of one parent: count ~ Poisson(A), offsets drawn from g and h;
// children outside the domain are discarded (the truncation G integrates).
std::vector<Event> sample_offspring(const Event& parent, const SimSpec& spec, RngStream& stream);

struct SimResult {
    EventCatalog catalog;
    std::vector<int> generation;  // 0 = background
    std::vector<long> parent;     // index into the sorted catalog, -1 = background
};

SimResult simulate(const SimSpec& spec);

} // namespace roadhawk
