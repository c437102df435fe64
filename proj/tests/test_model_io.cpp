#include "roadhawk/model_io.hpp"

#include "roadhawk/fitter.hpp"
#include "roadhawk/simulator.hpp"
#include "roadhawk/validation.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace roadhawk;

TEST_CASE("model documents round-trip value-exactly") {
    ModelComponents truth = testsupport::planted_model(0.1, 14.0 * 1440.0, 60000.0, 500.0);
    SimResult sim = simulate(make_sim_spec(truth, 12));
    FitConfig cfg;
    cfg.bw_trend = 5040.0;
    cfg.bw_h = 300.0;
    cfg.grid_dt = 2.0;
    cfg.grid_dx = 200.0;
    cfg.max_iters = 8;
    auto [model, report] = fit(sim.catalog, cfg);
    (void)report;

    testsupport::TempDir dir("model_io");
    const auto file = dir.path / "model.json";
    save_model(model, file);
    ModelComponents loaded = load_model(file);

    CHECK(loaded.mu0 == model.mu0);
    CHECK(loaded.branching == model.branching);
    CHECK(loaded.anchor_min == model.anchor_min);
    CHECK(loaded.domain.t_len == model.domain.t_len);
    CHECK(loaded.domain.spatial_ring == model.domain.spatial_ring);
    CHECK(loaded.config.bw_h == model.config.bw_h);
    CHECK(loaded.enabled.triggering == model.enabled.triggering);
    REQUIRE(loaded.mu_d.cache.values.size() == model.mu_d.cache.values.size());
    for (std::size_t i = 0; i < model.mu_d.cache.values.size(); ++i)
        CHECK(loaded.mu_d.cache.values[i] == model.mu_d.cache.values[i]);
    REQUIRE(loaded.g.centers.size() == model.g.centers.size());
    for (std::size_t i = 0; i < model.g.centers.size(); ++i) {
        CHECK(loaded.g.centers[i] == model.g.centers[i]);
        CHECK(loaded.g.weights[i] == model.g.weights[i]);
    }

    // reloaded model reproduces the transformed-time sequence to 1e-12
    auto a = transform_times(model, sim.catalog);
    auto b = transform_times(loaded, sim.catalog);
    REQUIRE(a.size() == b.size());
    for (std::size_t i = 0; i < a.size(); ++i) {
        CHECK(std::abs(a[i] - b[i]) <=
              1e-12 * std::max(1.0, std::abs(a[i])));
    }

    // intensity evaluations agree bitwise through the cache
    std::span<const Event> events(sim.catalog.events);
    for (std::size_t i : {std::size_t{0}, events.size() / 2, events.size() - 1}) {
        const Event& e = events[i];
        CHECK(model.intensity(e.t, e.x, events.first(i)) ==
              loaded.intensity(e.t, e.x, events.first(i)));
    }
}

TEST_CASE("save is atomic and rejects foreign documents") {
    testsupport::TempDir dir("model_io_bad");
    const auto file = dir.path / "not_model.json";
    {
        std::FILE* f = std::fopen(file.string().c_str(), "w");
        std::fputs("{\"format\": \"something-else\"}", f);
        std::fclose(f);
    }
    CHECK_THROWS_AS(load_model(file), Error);
    CHECK_THROWS_AS(load_model(dir.path / "missing.json"), Error);
}
