#pragma once

#include "roadhawk/localizer.hpp"
#include "roadhawk/simulator.hpp"

#include <cmath>

namespace testsupport {

struct LoopFixtureSpec {
    std::size_t n_loops = 6;
    double spacing_m = 600.0;
    double first_pos_m = 1000.0;
    int n_days = 35;                 // history depth for the seasonal medians
    double sigma_speed = 5.0;        // km/h
    double sigma_occ = 3.0;          // %
    // planted incident between loops incident_pair-1 and incident_pair
    std::size_t incident_pair = 3;
    long incident_start_min = 20 * 1440 + 600;
    long incident_duration_min = 45;
    double speed_drop_kmh = 30.0;
    double occ_rise_pct = 20.0;
    std::uint64_t seed = 1;
};

// Seasonal base (rush-hour dips) + Gaussian noise + a step incident on the
// loops upstream of the planted location.
inline roadhawk::LoopNetwork make_loop_fixture(const LoopFixtureSpec& spec) {
    using roadhawk::RngStream;
    roadhawk::LoopNetwork network;
    network.start_min = 0;
    const std::size_t len = static_cast<std::size_t>(spec.n_days) * 1440;

    auto seasonal_speed = [](long minute) {
        const double md = static_cast<double>(minute % 1440);
        const double rush = std::exp(-0.5 * std::pow((md - 510.0) / 90.0, 2)) +
                            std::exp(-0.5 * std::pow((md - 1050.0) / 110.0, 2));
        return 112.0 - 25.0 * rush;
    };
    auto seasonal_occ = [](long minute) {
        const double md = static_cast<double>(minute % 1440);
        const double rush = std::exp(-0.5 * std::pow((md - 510.0) / 90.0, 2)) +
                            std::exp(-0.5 * std::pow((md - 1050.0) / 110.0, 2));
        return 7.0 + 14.0 * rush;
    };

    RngStream stream = RngStream::root(spec.seed);
    for (std::size_t i = 0; i < spec.n_loops; ++i) {
        roadhawk::LoopSeries loop;
        loop.loop_id = "L" + std::to_string(i);
        loop.position_m = spec.first_pos_m + spec.spacing_m * static_cast<double>(i);
        loop.speed.resize(len);
        loop.flow.resize(len);
        loop.occupancy.resize(len);
        RngStream ls = stream.child(i);
        for (std::size_t m = 0; m < len; ++m) {
            const long minute = network.start_min + static_cast<long>(m);
            double speed = seasonal_speed(minute);
            double occ = seasonal_occ(minute);
            // incident affects loops upstream of the planted gap
            const bool in_window =
                minute >= spec.incident_start_min &&
                minute < spec.incident_start_min + spec.incident_duration_min;
            if (in_window && i < spec.incident_pair) {
                speed -= spec.speed_drop_kmh;
                occ += spec.occ_rise_pct;
            }
            const double u1 = ls.next_double();
            const double u2 = ls.next_double();
            const double r = std::sqrt(-2.0 * std::log1p(-u1));
            const double z1 = r * std::cos(2.0 * M_PI * u2);
            const double z2 = r * std::sin(2.0 * M_PI * u2);
            loop.speed[m] = speed + spec.sigma_speed * z1;
            loop.occupancy[m] = std::max(0.0, occ + spec.sigma_occ * z2);
            loop.flow[m] = 30.0 + 0.2 * (110.0 - speed);
        }
        network.loops.push_back(std::move(loop));
    }
    return network;
}

inline roadhawk::EventWindow fixture_window(const LoopFixtureSpec& spec) {
    roadhawk::EventWindow w;
    w.t_start = static_cast<double>(spec.incident_start_min - 5);
    w.t_end = static_cast<double>(spec.incident_start_min + spec.incident_duration_min + 5);
    w.x_lo = spec.first_pos_m - 0.5 * spec.spacing_m;
    w.x_hi = spec.first_pos_m + spec.spacing_m * (static_cast<double>(spec.n_loops) - 0.5);
    return w;
}

} // namespace testsupport
