#include "roadhawk/validation.hpp"

#include "roadhawk/fitter.hpp"
#include "roadhawk/simulator.hpp"
#include "roadhawk/special_functions.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace roadhawk;

namespace {

ModelComponents homogeneous_mle(const EventCatalog& cat) {
    ModelComponents m;
    m.domain = cat.domain;
    m.anchor_min = cat.anchor_min;
    m.mu0 = static_cast<double>(cat.size()) / (cat.domain.t_len * cat.domain.x_len);
    m.branching = 0.0;
    m.enabled = ComponentFlags{false, false, false, false, false};
    m.mu_d = make_flat_component(CurveAxis::daily, 1440.0, true, 10.0);
    m.mu_w = make_flat_component(CurveAxis::weekly, 10080.0, true, 60.0);
    m.mu_t = make_flat_component(CurveAxis::trend, cat.domain.t_len, false, 60.0);
    m.mu_s = make_flat_component(CurveAxis::spatial, cat.domain.x_len, false, 100.0);
    m.g = make_flat_trigger(720.0, 1.0);
    m.h = make_flat_trigger(10000.0, 100.0);
    return m;
}

} // namespace

TEST_CASE("transformed times under a homogeneous model are mu0 X t") {
    StudyDomain dom{5000.0, 2000.0};
    EventCatalog cat;
    cat.domain = dom;
    cat.events = {{100.0, 500.0}, {900.0, 1500.0}, {4000.0, 100.0}};
    ModelComponents m = homogeneous_mle(cat);
    auto seq = transform_times(m, cat);
    REQUIRE(seq.size() == 3);
    for (std::size_t i = 0; i < 3; ++i)
        CHECK(seq[i] ==
              doctest::Approx(m.mu0 * dom.x_len * cat.events[i].t).epsilon(1e-9));
}

TEST_CASE("total transformed mass equals mu0 U + A G at the window end") {
    ModelComponents truth = testsupport::planted_model(0.1, 14.0 * 1440.0, 60000.0, 500.0);
    SimResult sim = simulate(make_sim_spec(truth, 7));
    EventCatalog cat = sim.catalog;
    REQUIRE(cat.size() > 100);
    cat.events.back().t = cat.domain.t_len; // pin the last event to T
    sort_events(cat.events);
    auto seq = transform_times(truth, cat);
    UG ug = compute_U_G(truth, cat);
    const double expected = truth.mu0 * ug.U + truth.branching * ug.G;
    CHECK(seq.back() == doctest::Approx(expected).epsilon(1e-6));
}

TEST_CASE("transformed sequence is non-decreasing") {
    ModelComponents truth = testsupport::planted_model(0.1, 14.0 * 1440.0, 60000.0, 500.0);
    SimResult sim = simulate(make_sim_spec(truth, 9));
    auto seq = transform_times(truth, sim.catalog);
    for (std::size_t i = 1; i < seq.size(); ++i) CHECK(seq[i] >= seq[i - 1]);
}

TEST_CASE("to_uniform forced values") {
    std::vector<double> seq{std::log(2.0), std::log(2.0) + 0.0, std::log(2.0) + 50.0};
    auto z = to_uniform(seq);
    CHECK(z[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(z[1] == 0.0);
    CHECK(z[2] == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> bad{1.0, 0.5};
    CHECK_THROWS_AS(to_uniform(bad), Error);
}

TEST_CASE("ks_band matches the Kolmogorov inversion") {
    CHECK(std::abs(ks_band(100, 0.05) - 0.135810) < 1e-4);
    CHECK(std::abs(ks_band(100, 0.01) - 0.162762) < 1e-4);
    // sqrt-n scaling is exact
    CHECK(ks_band(400, 0.05) == doctest::Approx(ks_band(100, 0.05) / 2.0).epsilon(1e-12));
    // tail function sanity at the tabulated point
    CHECK(kolmogorov_tail(1.35810) == doctest::Approx(0.05).epsilon(1e-4));
}

TEST_CASE("qq_band against the incomplete-beta oracle") {
    auto [lo1, hi1] = qq_band(1, 1, 0.05);
    CHECK(lo1 == doctest::Approx(0.025).epsilon(1e-8));
    CHECK(hi1 == doctest::Approx(0.975).epsilon(1e-8));

    // Beta(2,2) CDF is 3u^2 - 2u^3; invert it independently by bisection
    auto beta22_quantile = [](double p) {
        double lo = 0.0, hi = 1.0;
        while (hi - lo > 1e-12) {
            const double mid = 0.5 * (lo + hi);
            const double cdf = 3.0 * mid * mid - 2.0 * mid * mid * mid;
            (cdf < p ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    };
    auto [lo2, hi2] = qq_band(3, 2, 0.05);
    CHECK(std::abs(lo2 - beta22_quantile(0.025)) < 1e-8);
    CHECK(std::abs(hi2 - beta22_quantile(0.975)) < 1e-8);
    CHECK(lo2 == doctest::Approx(0.09430).epsilon(2e-4));
    CHECK(hi2 == doctest::Approx(0.90570).epsilon(2e-4));

    // symmetry about one half
    auto [lo3, hi3] = qq_band(7, 2, 0.05);
    auto [lo4, hi4] = qq_band(7, 6, 0.05);
    CHECK(lo3 == doctest::Approx(1.0 - hi4).epsilon(1e-9));
    CHECK(hi3 == doctest::Approx(1.0 - lo4).epsilon(1e-9));

    // widths shrink with n at fixed k/n
    double prev_width = 10.0;
    for (std::size_t n : {4, 8, 16, 32, 64}) {
        auto [lo, hi] = qq_band(n, n / 2, 0.05);
        CHECK(hi - lo < prev_width);
        prev_width = hi - lo;
    }
    CHECK_THROWS_AS(qq_band(5, 0, 0.05), Error);
    CHECK_THROWS_AS(qq_band(5, 6, 0.05), Error);
}

TEST_CASE("validating the true model passes the 95% band in most seeds") {
    int passes = 0;
    for (std::uint64_t seed = 101; seed <= 110; ++seed) {
        ModelComponents truth = testsupport::planted_model(0.1, 30.0 * 1440.0, 90000.0, 800.0);
        SimResult sim = simulate(make_sim_spec(truth, seed));
        ValidationReport report = validate(truth, sim.catalog, ValidationMode::in_sample);
        if (report.pass95) ++passes;
        CHECK(report.z.size() == sim.catalog.size());
        for (double z : report.z) {
            CHECK(z >= 0.0);
            CHECK(z <= 1.0);
        }
    }
    CHECK(passes >= 8);
}

TEST_CASE("a homogeneous model fails against strongly seasonal data") {
    int failures = 0;
    for (std::uint64_t seed = 201; seed <= 210; ++seed) {
        ModelComponents truth =
            testsupport::strongly_seasonal_model(30.0 * 1440.0, 90000.0, 1400.0);
        SimResult sim = simulate(make_sim_spec(truth, seed));
        REQUIRE(sim.catalog.size() >= 1000);
        ModelComponents homog = homogeneous_mle(sim.catalog);
        ValidationReport report = validate(homog, sim.catalog, ValidationMode::in_sample);
        if (!report.pass95) ++failures;
    }
    CHECK(failures >= 9);
}

TEST_CASE("out-of-sample validation requires the trend disabled") {
    ModelComponents truth = testsupport::planted_model(0.05, 7.0 * 1440.0, 30000.0, 200.0);
    SimResult sim = simulate(make_sim_spec(truth, 5));
    CHECK_THROWS_AS(validate(truth, sim.catalog, ValidationMode::out_of_sample), Error);
    ModelComponents no_trend = truth;
    no_trend.enabled.trend = false;
    ValidationReport report = validate(no_trend, sim.catalog, ValidationMode::out_of_sample);
    CHECK(report.mode == ValidationMode::out_of_sample);
}

TEST_CASE("95% band exceedances stay within binomial tolerance across seeds") {
    int exceed = 0;
    const int n_seeds = 24;
    for (int seed = 0; seed < n_seeds; ++seed) {
        ModelComponents truth = testsupport::planted_model(0.08, 21.0 * 1440.0, 60000.0, 600.0);
        SimResult sim = simulate(make_sim_spec(truth, 1000 + static_cast<std::uint64_t>(seed)));
        ValidationReport report = validate(truth, sim.catalog, ValidationMode::in_sample);
        if (!report.pass95) ++exceed;
    }
    // Binomial(24, 0.05): P(X > 5) < 2e-3
    CHECK(exceed <= 5);
}

TEST_CASE("small-sample reports are flagged") {
    StudyDomain dom{5000.0, 2000.0};
    EventCatalog cat;
    cat.domain = dom;
    for (int i = 0; i < 12; ++i) cat.events.push_back({400.0 * i + 10.0, 1000.0});
    ModelComponents m = homogeneous_mle(cat);
    ValidationReport report = validate(m, cat, ValidationMode::in_sample);
    CHECK(report.small_n);
    CHECK(report.qq.size() == 12);
}
