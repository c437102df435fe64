#include "roadhawk/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace roadhawk {

namespace {

constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kChildSalt = 0xa0761d6478bd642fULL;

std::uint64_t mix64(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xbf58476d1ce4e5b9ULL;
    z ^= z >> 27;
    z *= 0x94d049bb133111ebULL;
    z ^= z >> 31;
    return z;
}

double curve_max(const ComponentCurve& curve, bool enabled) {
    if (!enabled || curve.degenerate || curve.cache.values.empty()) return 1.0;
    return curve.cache.max_value();
}

} // namespace

RngStream RngStream::root(std::uint64_t seed) {
    return {mix64(seed ^ kGolden), 0};
}

RngStream RngStream::child(std::uint64_t index) const {
    return {mix64(key ^ ((index + 1) * kChildSalt)), 0};
}

std::uint64_t RngStream::next_u64() {
    ++counter;
    return mix64(key + counter * kGolden);
}

double RngStream::next_double() {
    return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
}

double RngStream::next_exponential() {
    return -std::log1p(-next_double());
}

std::uint64_t RngStream::next_poisson(double mean) {
    if (!(mean > 0.0)) return 0;
    std::uint64_t n = 0;
    double acc = next_exponential();
    while (acc <= mean) {
        ++n;
        acc += next_exponential();
    }
    return n;
}

SimSpec make_sim_spec(const ModelComponents& model, std::uint64_t seed) {
    SimSpec spec;
    spec.model = model;
    spec.domain = model.domain;
    spec.anchor_min = model.anchor_min;
    spec.seed = seed;
    return spec;
}

double sample_from_cache(const PiecewiseLinear& density, const std::vector<double>& cumulative,
                         double u) {
    if (cumulative.empty() || !(cumulative.back() > 0.0))
        throw Error("sample_from_cache: degenerate density");
    const double target = u * cumulative.back();
    auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
    std::size_t i = it == cumulative.begin()
                        ? 0
                        : static_cast<std::size_t>(it - cumulative.begin()) - 1;
    if (i >= cumulative.size() - 1) i = cumulative.size() - 2;
    const double h = density.step();
    const double v0 = density.values[i];
    const double v1 = density.values[i + 1];
    const double rest = target - cumulative[i];
    const double slope = (v1 - v0) / h;
    double s;
    if (std::abs(slope) * h < 1e-14 * std::max(v0, 1e-300)) {
        s = v0 > 0.0 ? rest / v0 : 0.0;
    } else {
        const double disc = v0 * v0 + 2.0 * slope * rest;
        const double root = std::sqrt(std::max(disc, 0.0));
        // stable quadratic root for 0.5*slope*s^2 + v0*s - rest = 0
        s = slope > 0.0 ? (root - v0) / slope : 2.0 * rest / (v0 + root);
    }
    s = std::clamp(s, 0.0, h);
    return density.lo + h * static_cast<double>(i) + s;
}

std::vector<Event> sample_background(const SimSpec& spec) {
    const ModelComponents& m = spec.model;
    const StudyDomain& dom = spec.domain;
    std::vector<Event> out;
    if (!(m.mu0 > 0.0)) return out;

    const double mod_max = curve_max(m.mu_d, m.enabled.daily) *
                           curve_max(m.mu_w, m.enabled.weekly) *
                           curve_max(m.mu_t, m.enabled.trend) *
                           curve_max(m.mu_s, m.enabled.spatial);
    const double lambda_bar = m.mu0 * mod_max;
    const double total = lambda_bar * dom.t_len * dom.x_len;

    RngStream stream = RngStream::root(spec.seed).child(0);
    const std::uint64_t candidates = stream.next_poisson(total);
    out.reserve(static_cast<std::size_t>(static_cast<double>(candidates) / std::max(mod_max, 1.0)) +
                16);
    for (std::uint64_t c = 0; c < candidates; ++c) {
        const double t = stream.next_double() * dom.t_len;
        const double x = stream.next_double() * dom.x_len;
        const double u = stream.next_double();
        double modulation = 1.0;
        if (m.enabled.daily) {
            double p = std::fmod(t + spec.anchor_min, dom.day_min);
            if (p < 0.0) p += dom.day_min;
            modulation *= m.mu_d.value(p);
        }
        if (m.enabled.weekly) {
            double p = std::fmod(t + spec.anchor_min, dom.week_min);
            if (p < 0.0) p += dom.week_min;
            modulation *= m.mu_w.value(p);
        }
        if (m.enabled.trend) modulation *= m.mu_t.value(t);
        if (m.enabled.spatial) modulation *= m.mu_s.value(x);
        if (u * mod_max < modulation) out.push_back({t, x});
    }
    sort_events(out);
    return out;
}

std::vector<Event> sample_offspring(const Event& parent, const SimSpec& spec, RngStream& stream) {
    std::vector<Event> out;
    const ModelComponents& m = spec.model;
    if (!m.enabled.triggering || !(m.branching > 0.0) || m.g.no_evidence || m.h.no_evidence)
        return out;
    const std::uint64_t count = stream.next_poisson(m.branching);
    for (std::uint64_t k = 0; k < count; ++k) {
        const double dt = sample_from_cache(m.g.cache, m.g.cumulative, stream.next_double());
        const double dx = sample_from_cache(m.h.cache, m.h.cumulative, stream.next_double());
        const double t = parent.t + dt;
        const double x = parent.x - dx;
        if (t > spec.domain.t_len || x < 0.0) continue;
        out.push_back({t, x});
    }
    return out;
}

SimResult simulate(const SimSpec& spec) {
    if (!(spec.model.branching < 1.0)) throw Error("simulate: branching ratio must be below 1");
    struct Node {
        Event event;
        int generation;
        long parent; // creation index
        RngStream stream;
    };

    RngStream root = RngStream::root(spec.seed);
    std::vector<Node> nodes;
    {
        std::vector<Event> background = sample_background(spec);
        RngStream bg_streams = root.child(1);
        nodes.reserve(background.size() * 2);
        for (std::size_t i = 0; i < background.size(); ++i)
            nodes.push_back({background[i], 0, -1, bg_streams.child(i)});
    }

    for (std::size_t head = 0; head < nodes.size(); ++head) {
        Node node = nodes[head]; // copy; nodes may reallocate
        std::vector<Event> children = sample_offspring(node.event, spec, node.stream);
        if (children.empty()) continue;
        if (node.generation + 1 > spec.max_generations)
            throw Error("simulate: generation cap exceeded (branching ratio too close to 1)");
        for (std::size_t k = 0; k < children.size(); ++k)
            nodes.push_back({children[k], node.generation + 1, static_cast<long>(head),
                             nodes[head].stream.child(k + 1)});
    }

    std::vector<std::size_t> order(nodes.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
        const Event& ea = nodes[a].event;
        const Event& eb = nodes[b].event;
        if (ea.t != eb.t) return ea.t < eb.t;
        if (ea.x != eb.x) return ea.x < eb.x;
        return a < b;
    });
    std::vector<long> creation_to_sorted(nodes.size(), -1);
    for (std::size_t s = 0; s < order.size(); ++s)
        creation_to_sorted[order[s]] = static_cast<long>(s);

    SimResult result;
    result.catalog.domain = spec.domain;
    result.catalog.anchor_min = spec.anchor_min;
    result.catalog.events.reserve(nodes.size());
    result.generation.reserve(nodes.size());
    result.parent.reserve(nodes.size());
    for (std::size_t s = 0; s < order.size(); ++s) {
        const Node& node = nodes[order[s]];
        result.catalog.events.push_back(node.event);
        result.generation.push_back(node.generation);
        result.parent.push_back(node.parent < 0 ? -1
                                                : creation_to_sorted[static_cast<std::size_t>(
                                                      node.parent)]);
    }
    return result;
}

} // namespace roadhawk
