#include "roadhawk/kernels.hpp"

#include "roadhawk/catalog.hpp"
#include "support/oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace roadhawk;
using testsupport::quadrature;

TEST_CASE("gaussian matches the standard normal density") {
    CHECK(gaussian(0.0, 1.0) == doctest::Approx(0.3989423).epsilon(1e-6));
    CHECK(gaussian(1.0, 1.0) == doctest::Approx(0.2419707).epsilon(1e-6));
    // scaling symmetry k_2(2) = k_1(1) / 2
    CHECK(gaussian(2.0, 2.0) == doctest::Approx(gaussian(1.0, 1.0) / 2.0).epsilon(1e-12));
    CHECK_THROWS_AS(gaussian(0.0, 0.0), Error);
    CHECK_THROWS_AS(gaussian(0.0, -1.0), Error);
}

TEST_CASE("normal_cdf against tabulated values") {
    // Abramowitz & Stegun table values
    CHECK(std::abs(normal_cdf(0.0) - 0.5) < 1e-14);
    CHECK(std::abs(normal_cdf(1.0) - 0.8413447460685429) < 1e-12);
    CHECK(std::abs(normal_cdf(-1.0) - 0.1586552539314571) < 1e-12);
    CHECK(std::abs(normal_cdf(1.96) - 0.9750021048517795) < 1e-12);
    CHECK(std::abs(normal_cdf(3.0) - 0.9986501019683699) < 1e-12);
    CHECK(std::abs(normal_cdf(-3.0) - 0.0013498980316301) < 1e-12);
}

TEST_CASE("weight_truncated mirror doubles the boundary value") {
    const double inf = std::numeric_limits<double>::infinity();
    const double v = weight_truncated(0.0, 0.0, 1.0, 0.0, inf, true, false);
    CHECK(v == doctest::Approx(0.7978846).epsilon(1e-6));
}

TEST_CASE("weight_truncated far from boundaries matches the plain gaussian") {
    const double omega = 1.0;
    const double c = 3.0 * omega;
    // boundaries far away on both sides
    for (double x : {2.0, 3.0, 4.5}) {
        const double w = weight_truncated(x, c, omega, -100.0, 100.0, true, true);
        CHECK(std::abs(w - gaussian(x - c, omega)) / gaussian(x - c, omega) < 1e-3);
    }
}

TEST_CASE("weight_truncated with infinite bounds equals the gaussian") {
    const double inf = std::numeric_limits<double>::infinity();
    for (double x : {-2.0, 0.3, 1.7}) {
        const double w = weight_truncated(x, 0.4, 1.3, -inf, inf, false, false);
        CHECK(std::abs(w - gaussian(x - 0.4, 1.3)) < 1e-12);
    }
}

TEST_CASE("weight_truncated integrates to one (quadrature oracle)") {
    const double omega = 2.0;
    for (double c : {0.0, 0.5, 3.0, 9.5}) {
        const double mass = quadrature(
            [&](double x) { return weight_truncated(x, c, omega, 0.0, 10.0, true, true); }, 0.0,
            10.0, omega / 50.0);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("weight_truncated rejects points outside the domain") {
    CHECK_THROWS_AS(weight_truncated(-0.1, 1.0, 1.0, 0.0, 10.0, true, false), Error);
}

TEST_CASE("weight_periodic value and seam behaviour") {
    // center at midday: side terms negligible, value is gaussian(0, 60)
    const double v = weight_periodic(720.0, 720.0, 60.0, 1440.0);
    CHECK(v == doctest::Approx(0.0066491).epsilon(1e-4));

    // periodicity at the seam for a center on the seam
    const double at0 = weight_periodic(0.0, 0.0, 60.0, 1440.0);
    const double at_end = weight_periodic(1440.0 - 1e-9, 0.0, 60.0, 1440.0);
    CHECK(std::abs(at0 - at_end) < 1e-9);

    // exact wrap equality
    for (double x : {37.0, 555.5, 1200.0}) {
        CHECK(weight_periodic(x + 1440.0, 100.0, 60.0, 1440.0) ==
              weight_periodic(x, 100.0, 60.0, 1440.0));
    }
}

TEST_CASE("weight_periodic integrates to one (quadrature oracle)") {
    const double omega = 60.0;
    for (double c : {0.0, 10.0, 700.0, 1439.0}) {
        const double mass = quadrature(
            [&](double x) { return weight_periodic(x, c, omega, 1440.0); }, 0.0, 1440.0,
            omega / 50.0);
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-6));
    }
}

TEST_CASE("weights are nonnegative everywhere") {
    for (double x = 0.0; x <= 10.0; x += 0.37) {
        CHECK(weight_truncated(x, 4.0, 1.5, 0.0, 10.0, true, true) >= 0.0);
        CHECK(weight_periodic(x, 4.0, 1.5, 10.0) >= 0.0);
    }
}
