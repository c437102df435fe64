#include "roadhawk/background.hpp"
#include "roadhawk/fitter.hpp"
#include "roadhawk/simulator.hpp"
#include "roadhawk/validation.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <cmath>

using namespace roadhawk;

namespace {

FitConfig recovery_config() {
    FitConfig cfg;
    cfg.bw_trend = 10080.0;
    cfg.bw_h = 300.0;
    cfg.bw_spatial = 4000.0;
    cfg.grid_dt = 2.0;
    cfg.grid_dx = 200.0;
    cfg.max_iters = 60;
    return cfg;
}

} // namespace

TEST_CASE("converged psi recovers a double-peak daily shape") {
    ModelComponents truth = testsupport::planted_model(0.1, 45.0 * 1440.0, 120000.0, 1200.0);
    SimResult sim = simulate(make_sim_spec(truth, 301));
    REQUIRE(sim.catalog.size() > 800);
    auto [model, report] = fit(sim.catalog, recovery_config());
    CHECK(report.loglik > report.loglik_homogeneous);

    // planted peaks at 480 and 1020 minutes re-emerge within 2 bandwidths
    const auto& v = model.mu_d.cache.values;
    for (double target : {480.0, 1020.0}) {
        double best = -1.0, best_coord = 0.0;
        for (std::size_t m = 0; m < v.size(); ++m) {
            const double coord = model.mu_d.cache.coord(m);
            if (std::abs(coord - target) < 240.0 && v[m] > best) {
                best = v[m];
                best_coord = coord;
            }
        }
        CHECK(std::abs(best_coord - target) <= 120.0);
        CHECK(best > 1.0);
    }
}

TEST_CASE("branching recovery on a single medium synthetic catalog") {
    ModelComponents truth = testsupport::planted_model(0.10);
    SimResult sim = simulate(make_sim_spec(truth, 77));
    REQUIRE(sim.catalog.size() > 1200);
    FitConfig cfg = recovery_config();
    cfg.grid_dt = 1.0;
    cfg.grid_dx = 100.0;
    auto [model, report] = fit(sim.catalog, cfg);
    CHECK(model.branching > 0.05);
    CHECK(model.branching < 0.16);
    CHECK(report.loglik > report.loglik_homogeneous);
}

TEST_CASE("final branching is insensitive to its initialization") {
    ModelComponents truth = testsupport::planted_model(0.1, 30.0 * 1440.0, 90000.0, 900.0);
    for (std::uint64_t seed = 501; seed <= 510; ++seed) {
        SimResult sim = simulate(make_sim_spec(truth, seed));
        FitConfig cfg = recovery_config();
        cfg.init_branching = 0.01;
        auto [model_a, report_a] = fit(sim.catalog, cfg);
        cfg.init_branching = 0.3;
        auto [model_b, report_b] = fit(sim.catalog, cfg);
        CHECK(std::abs(model_a.branching - model_b.branching) < 0.01);
    }
}

TEST_CASE("fit then in-sample validate passes the 95% band in most seeds") {
    int passes = 0;
    const int n_seeds = 6;
    for (std::uint64_t seed = 601; seed < 601 + n_seeds; ++seed) {
        ModelComponents truth = testsupport::planted_model(0.1, 45.0 * 1440.0, 120000.0, 1000.0);
        SimResult sim = simulate(make_sim_spec(truth, seed));
        auto [model, report] = fit(sim.catalog, recovery_config());
        ValidationReport val = validate(model, sim.catalog, ValidationMode::in_sample);
        if (val.pass95) ++passes;
    }
    CHECK(passes >= n_seeds - 1);
}
