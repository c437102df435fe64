#pragma once

#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace roadhawk {

// All times are minutes since the study window start, all positions are
// meters of chainage in the direction of travel. Intensities are
// events / minute / meter.

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Event {
    double t = 0.0;  // minutes
    double x = 0.0;  // meters
};

struct StudyDomain {
    double t_len = 0.0;        // total window length, minutes
    double x_len = 0.0;        // roadway length, meters
    double day_min = 1440.0;   // minutes per day
    double week_min = 10080.0; // minutes per week (= 7 * day_min)
    bool spatial_ring = false; // carriageway closes into a ring

    void validate() const;
};

// Minutes into the week at t = 0. Monday 00:00 is 0; a CSV may override it
// with a `#anchor=<weekday>,<hh:mm>` comment line.
double parse_anchor(const std::string& weekday, int hour, int minute);

struct EventCatalog {
    StudyDomain domain;
    double anchor_min = 0.0;
    std::vector<Event> events; // sorted by (t, x)

    std::size_t size() const { return events.size(); }
    void validate() const;

    double daily_phase(double t) const;
    double weekly_phase(double t) const;
};

struct FitConfig {
    double bw_daily = 60.0;     // minutes
    double bw_weekly = 600.0;   // minutes
    double bw_trend = 20160.0;  // minutes
    double bw_spatial = 5500.0; // meters
    double bw_g = 30.0;         // minutes
    double bw_h = 500.0;        // meters
    double trigger_horizon_t = 720.0;   // minutes
    double trigger_horizon_x = 10000.0; // meters
    double mono_epsilon = 0.0;
    double init_branching = 0.05;
    int max_iters = 100;
    double tol = 1e-4;
    double grid_dt = 1.0;       // minutes
    double grid_dx = 100.0;     // meters

    void validate() const;
};

struct RowReject {
    long line = 0;
    std::string reason;
};

struct LoadReport {
    std::vector<RowReject> rejected;
};

// Reads a `t_min,x_m` CSV (optional `#` comments, optional extra columns).
// Out-of-domain rows are dropped and reported; malformed rows, a missing
// file and an empty result throw. Comment hints `#anchor=`, `#T=`, `#X=`,
// `#ring=` are honored by read_domain_hints below.
EventCatalog load_catalog(const std::filesystem::path& path, const StudyDomain& domain,
                          LoadReport* report = nullptr);

struct DomainHints {
    bool has_t = false, has_x = false, has_ring = false, has_anchor = false;
    double t_len = 0.0, x_len = 0.0;
    bool ring = false;
    double anchor_min = 0.0;
};

DomainHints read_domain_hints(const std::filesystem::path& path);

// Writes the catalog back out; with provenance attached the header becomes
// `t_min,x_m,gen,parent`. Loading a saved catalog reproduces it bit-exactly.
void save_catalog(const EventCatalog& catalog, const std::filesystem::path& path,
                  std::span<const int> generation = {}, std::span<const long> parent = {});

void sort_events(std::vector<Event>& events);

} // namespace roadhawk
