#pragma once

#include "roadhawk/catalog.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace roadhawk {

// Minute-resolution sensor series; NaN marks missing minutes. All loops in a
// network share the same minute clock starting at start_min.
struct LoopSeries {
    std::string loop_id;
    double position_m = 0.0;
    std::vector<double> speed;     // km/h
    std::vector<double> flow;      // veh/min
    std::vector<double> occupancy; // %
};

struct LoopNetwork {
    std::vector<LoopSeries> loops; // positions strictly increasing
    long start_min = 0;
    double anchor_min = 0.0;       // weekday phase of absolute minute 0
};

struct EventWindow {
    double t_start = 0.0;
    double t_end = 0.0;
    double x_lo = 0.0;
    double x_hi = 0.0;
};

// Trailing mean over the last `window` minutes; shorter at the head, missing
// samples are skipped.
std::vector<double> rolling_average(std::span<const double> series, int window = 5);

// Median per (weekday, minute of day) cell; cells with fewer than
// min_samples values stay unavailable (NaN).
struct SeasonalTable {
    std::array<std::vector<double>, 7> cells; // each 1440 wide
    double at(int weekday, int minute_of_day) const;
};

SeasonalTable seasonal_median(std::span<const double> series, long start_min, double anchor_min,
                              int min_samples = 4);

enum class EisAggregation { max, top5_mean };

struct PairScore {
    std::size_t upstream = 0;   // loop index i-1
    std::size_t downstream = 0; // loop index i
    double eis = 0.0;
    double speed_asymmetry = 0.0;
    bool available = false;
};

// EIS_i = (RS_i - RS_{i-1}) - (RO_i - RO_{i-1}) per minute, aggregated over
// the window; residual = smoothed measurement - seasonal median.
std::vector<PairScore> event_impact_scores(const EventWindow& window, const LoopNetwork& network,
                                           EisAggregation aggregation = EisAggregation::max);

struct LocalizeResult {
    double position_m = 0.0;
    bool low_confidence = false;
    double best_eis = 0.0;
};

LocalizeResult localize(const EventWindow& window, const LoopNetwork& network,
                        EisAggregation aggregation = EisAggregation::max);

struct SignificanceResult {
    bool keep = false;
    double max_drop_pct = 0.0;
};

// Largest percentage speed drop of the measured link series below its
// seasonal median profile inside the window.
SignificanceResult significance_filter(std::span<const double> link_speed, long start_min,
                                       const SeasonalTable& seasonal, double anchor_min,
                                       const EventWindow& window, double threshold_pct);

LoopNetwork load_loops(const std::filesystem::path& path);
std::vector<EventWindow> load_windows(const std::filesystem::path& path);

// Mean over member-loop speeds per minute; the link-level proxy used by the
// significance filter.
std::vector<double> link_speed_series(const LoopNetwork& network, double x_lo, double x_hi);

} // namespace roadhawk
