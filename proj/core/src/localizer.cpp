#include "roadhawk/localizer.hpp"

#include "roadhawk/csv.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>

namespace roadhawk {

namespace {
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

bool valid(double v) { return !std::isnan(v); }

// weekday (0 = Monday) and minute of day for an absolute minute index
std::pair<int, int> week_phase(long minute, double anchor_min) {
    double phase = std::fmod(static_cast<double>(minute) + anchor_min, 10080.0);
    if (phase < 0.0) phase += 10080.0;
    const int week_minute = static_cast<int>(phase);
    return {week_minute / 1440, week_minute % 1440};
}

} // namespace

std::vector<double> rolling_average(std::span<const double> series, int window) {
    if (window < 1) throw Error("rolling_average: window must be at least 1");
    if (series.empty()) throw Error("rolling_average: empty series");
    std::vector<double> out(series.size(), kNaN);
    for (std::size_t i = 0; i < series.size(); ++i) {
        double sum = 0.0;
        int count = 0;
        const std::size_t first = i + 1 >= static_cast<std::size_t>(window)
                                      ? i + 1 - static_cast<std::size_t>(window)
                                      : 0;
        for (std::size_t j = first; j <= i; ++j) {
            if (valid(series[j])) {
                sum += series[j];
                ++count;
            }
        }
        if (count > 0) out[i] = sum / count;
    }
    return out;
}

double SeasonalTable::at(int weekday, int minute_of_day) const {
    if (weekday < 0 || weekday > 6 || minute_of_day < 0 || minute_of_day > 1439) return kNaN;
    const auto& day = cells[static_cast<std::size_t>(weekday)];
    if (day.empty()) return kNaN;
    return day[static_cast<std::size_t>(minute_of_day)];
}

SeasonalTable seasonal_median(std::span<const double> series, long start_min, double anchor_min,
                              int min_samples) {
    SeasonalTable table;
    std::array<std::vector<std::vector<double>>, 7> buckets;
    for (auto& day : buckets) day.resize(1440);
    for (std::size_t i = 0; i < series.size(); ++i) {
        if (!valid(series[i])) continue;
        auto [wd, md] = week_phase(start_min + static_cast<long>(i), anchor_min);
        buckets[static_cast<std::size_t>(wd)][static_cast<std::size_t>(md)].push_back(series[i]);
    }
    for (int wd = 0; wd < 7; ++wd) {
        auto& out = table.cells[static_cast<std::size_t>(wd)];
        out.assign(1440, kNaN);
        for (int md = 0; md < 1440; ++md) {
            auto& vals = buckets[static_cast<std::size_t>(wd)][static_cast<std::size_t>(md)];
            if (static_cast<int>(vals.size()) < min_samples) continue;
            std::sort(vals.begin(), vals.end());
            const std::size_t n = vals.size();
            out[static_cast<std::size_t>(md)] =
                n % 2 == 1 ? vals[n / 2] : 0.5 * (vals[n / 2 - 1] + vals[n / 2]);
        }
    }
    return table;
}

namespace {

struct Residuals {
    std::vector<double> speed;
    std::vector<double> occupancy;
};

Residuals loop_residuals(const LoopSeries& loop, long start_min, double anchor_min) {
    Residuals r;
    const std::vector<double> sm_speed = rolling_average(loop.speed);
    const std::vector<double> sm_occ = rolling_average(loop.occupancy);
    const SeasonalTable season_speed = seasonal_median(sm_speed, start_min, anchor_min);
    const SeasonalTable season_occ = seasonal_median(sm_occ, start_min, anchor_min);
    r.speed.assign(sm_speed.size(), kNaN);
    r.occupancy.assign(sm_occ.size(), kNaN);
    for (std::size_t i = 0; i < sm_speed.size(); ++i) {
        auto [wd, md] = week_phase(start_min + static_cast<long>(i), anchor_min);
        const double ss = season_speed.at(wd, md);
        const double so = season_occ.at(wd, md);
        if (valid(sm_speed[i]) && valid(ss)) r.speed[i] = sm_speed[i] - ss;
        if (valid(sm_occ[i]) && valid(so)) r.occupancy[i] = sm_occ[i] - so;
    }
    return r;
}

std::vector<std::size_t> member_loops(const EventWindow& window, const LoopNetwork& network) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < network.loops.size(); ++i) {
        const double p = network.loops[i].position_m;
        if (p >= window.x_lo && p <= window.x_hi) idx.push_back(i);
    }
    return idx;
}

double aggregate(std::vector<double>& per_minute, EisAggregation how) {
    if (per_minute.empty()) return kNaN;
    if (how == EisAggregation::max) return *std::max_element(per_minute.begin(), per_minute.end());
    std::sort(per_minute.begin(), per_minute.end(), std::greater<double>());
    const std::size_t take = std::min<std::size_t>(5, per_minute.size());
    double sum = 0.0;
    for (std::size_t i = 0; i < take; ++i) sum += per_minute[i];
    return sum / static_cast<double>(take);
}

} // namespace

std::vector<PairScore> event_impact_scores(const EventWindow& window, const LoopNetwork& network,
                                           EisAggregation aggregation) {
    if (!(window.x_lo < window.x_hi) || !(window.t_start < window.t_end))
        throw Error("event_impact_scores: degenerate window");
    const std::vector<std::size_t> members = member_loops(window, network);
    if (members.size() < 2)
        throw Error("event_impact_scores: fewer than 2 loops in the window");

    std::vector<Residuals> residuals(members.size());
    for (std::size_t i = 0; i < members.size(); ++i)
        residuals[i] = loop_residuals(network.loops[members[i]], network.start_min,
                                      network.anchor_min);

    const long m_lo = std::max<long>(static_cast<long>(std::floor(window.t_start)) -
                                         network.start_min,
                                     0);
    const long m_hi = std::min<long>(static_cast<long>(std::ceil(window.t_end)) - network.start_min,
                                     static_cast<long>(network.loops.front().speed.size()) - 1);

    std::vector<PairScore> scores;
    for (std::size_t i = 1; i < members.size(); ++i) {
        PairScore score;
        score.upstream = members[i - 1];
        score.downstream = members[i];
        std::vector<double> eis_minutes, drs_minutes;
        for (long m = m_lo; m <= m_hi; ++m) {
            const auto mi = static_cast<std::size_t>(m);
            const double rs_up = residuals[i - 1].speed[mi];
            const double rs_dn = residuals[i].speed[mi];
            const double ro_up = residuals[i - 1].occupancy[mi];
            const double ro_dn = residuals[i].occupancy[mi];
            if (!valid(rs_up) || !valid(rs_dn) || !valid(ro_up) || !valid(ro_dn)) continue;
            const double drs = rs_dn - rs_up;
            const double dro = ro_dn - ro_up;
            eis_minutes.push_back(drs - dro);
            drs_minutes.push_back(drs);
        }
        if (!eis_minutes.empty()) {
            score.eis = aggregate(eis_minutes, aggregation);
            score.speed_asymmetry = aggregate(drs_minutes, aggregation);
            score.available = true;
        }
        scores.push_back(score);
    }
    return scores;
}

LocalizeResult localize(const EventWindow& window, const LoopNetwork& network,
                        EisAggregation aggregation) {
    LocalizeResult result;
    std::vector<PairScore> scores;
    try {
        scores = event_impact_scores(window, network, aggregation);
    } catch (const Error&) {
        result.position_m = 0.5 * (window.x_lo + window.x_hi);
        result.low_confidence = true;
        return result;
    }
    const PairScore* best = nullptr;
    for (const PairScore& s : scores) {
        if (!s.available) continue;
        if (best == nullptr || s.eis > best->eis ||
            (s.eis == best->eis && (s.speed_asymmetry > best->speed_asymmetry ||
                                    (s.speed_asymmetry == best->speed_asymmetry &&
                                     s.upstream < best->upstream))))
            best = &s;
    }
    if (best == nullptr) {
        result.position_m = 0.5 * (window.x_lo + window.x_hi);
        result.low_confidence = true;
        return result;
    }
    result.position_m = 0.5 * (network.loops[best->upstream].position_m +
                               network.loops[best->downstream].position_m);
    result.best_eis = best->eis;
    return result;
}

SignificanceResult significance_filter(std::span<const double> link_speed, long start_min,
                                       const SeasonalTable& seasonal, double anchor_min,
                                       const EventWindow& window, double threshold_pct) {
    if (!(threshold_pct >= 0.0) || threshold_pct >= 100.0)
        throw Error("significance_filter: threshold must lie in [0, 100)");
    const long m_lo = std::max<long>(static_cast<long>(std::floor(window.t_start)) - start_min, 0);
    const long m_hi = std::min<long>(static_cast<long>(std::ceil(window.t_end)) - start_min,
                                     static_cast<long>(link_speed.size()) - 1);
    if (m_lo > m_hi) throw Error("significance_filter: window does not overlap the series");
    SignificanceResult out;
    bool any = false;
    for (long m = m_lo; m <= m_hi; ++m) {
        const double measured = link_speed[static_cast<std::size_t>(m)];
        if (!valid(measured)) continue;
        auto [wd, md] = week_phase(start_min + m, anchor_min);
        const double median = seasonal.at(wd, md);
        if (!valid(median) || median <= 0.0) continue;
        any = true;
        out.max_drop_pct = std::max(out.max_drop_pct, 100.0 * (median - measured) / median);
    }
    if (!any) throw Error("significance_filter: no usable minutes in the window");
    out.keep = out.max_drop_pct >= threshold_pct;
    return out;
}

std::vector<double> link_speed_series(const LoopNetwork& network, double x_lo, double x_hi) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < network.loops.size(); ++i) {
        const double p = network.loops[i].position_m;
        if (p >= x_lo && p <= x_hi) members.push_back(i);
    }
    if (members.empty()) throw Error("link_speed_series: no loops in range");
    const std::size_t len = network.loops[members.front()].speed.size();
    std::vector<double> out(len, kNaN);
    for (std::size_t m = 0; m < len; ++m) {
        double sum = 0.0;
        int count = 0;
        for (std::size_t i : members) {
            const double v = network.loops[i].speed[m];
            if (valid(v)) {
                sum += v;
                ++count;
            }
        }
        if (count > 0) out[m] = sum / count;
    }
    return out;
}

LoopNetwork load_loops(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    struct Sample {
        long minute;
        double speed, flow, occ;
    };
    std::map<std::string, std::pair<double, std::vector<Sample>>> by_loop;
    LoopNetwork network;
    std::string line;
    long line_no = 0;
    bool header_seen = false;
    long min_minute = std::numeric_limits<long>::max();
    long max_minute = std::numeric_limits<long>::min();
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto eq = line.find('=');
            if (eq != std::string::npos && line.substr(1, eq - 1) == "anchor") {
                // reuse catalog anchor syntax: weekday,hh:mm
                auto body = line.substr(eq + 1);
                auto comma = body.find(',');
                auto colon = body.find(':');
                if (comma != std::string::npos && colon != std::string::npos) {
                    network.anchor_min = parse_anchor(body.substr(0, comma),
                                                      std::stoi(body.substr(comma + 1,
                                                                            colon - comma - 1)),
                                                      std::stoi(body.substr(colon + 1)));
                }
            }
            continue;
        }
        if (!header_seen) {
            if (csv::split(line).front() != "t_min")
                throw Error("line " + std::to_string(line_no) +
                            ": expected header 't_min,loop_id,pos_m,speed_kmh,flow_vpm,occ_pct'");
            header_seen = true;
            continue;
        }
        auto fields = csv::split(line);
        if (fields.size() < 6)
            throw Error("line " + std::to_string(line_no) + ": expected six fields");
        Sample s;
        s.minute = static_cast<long>(std::llround(csv::parse_double(fields[0], line_no)));
        const std::string& id = fields[1];
        const double pos = csv::parse_double(fields[2], line_no);
        auto parse_opt = [&](const std::string& f) {
            return f.empty() || f == "nan" ? kNaN : csv::parse_double(f, line_no);
        };
        s.speed = parse_opt(fields[3]);
        s.flow = parse_opt(fields[4]);
        s.occ = parse_opt(fields[5]);
        auto& slot = by_loop[id];
        if (slot.second.empty()) slot.first = pos;
        slot.second.push_back(s);
        min_minute = std::min(min_minute, s.minute);
        max_minute = std::max(max_minute, s.minute);
    }
    if (by_loop.empty()) throw Error("'" + path.string() + "': no loop data");

    network.start_min = min_minute;
    const auto len = static_cast<std::size_t>(max_minute - min_minute + 1);
    for (auto& [id, slot] : by_loop) {
        LoopSeries loop;
        loop.loop_id = id;
        loop.position_m = slot.first;
        loop.speed.assign(len, kNaN);
        loop.flow.assign(len, kNaN);
        loop.occupancy.assign(len, kNaN);
        for (const Sample& s : slot.second) {
            const auto i = static_cast<std::size_t>(s.minute - min_minute);
            loop.speed[i] = s.speed;
            loop.flow[i] = s.flow;
            loop.occupancy[i] = s.occ;
        }
        network.loops.push_back(std::move(loop));
    }
    std::sort(network.loops.begin(), network.loops.end(),
              [](const LoopSeries& a, const LoopSeries& b) { return a.position_m < b.position_m; });
    for (std::size_t i = 1; i < network.loops.size(); ++i)
        if (!(network.loops[i].position_m > network.loops[i - 1].position_m))
            throw Error("load_loops: loop positions must be strictly increasing");
    return network;
}

std::vector<EventWindow> load_windows(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    std::vector<EventWindow> out;
    std::string line;
    long line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        if (!header_seen) {
            header_seen = true;
            continue;
        }
        auto fields = csv::split(line);
        if (fields.size() < 4)
            throw Error("line " + std::to_string(line_no) + ": expected four fields");
        EventWindow w;
        w.t_start = csv::parse_double(fields[0], line_no);
        w.t_end = csv::parse_double(fields[1], line_no);
        w.x_lo = csv::parse_double(fields[2], line_no);
        w.x_hi = csv::parse_double(fields[3], line_no);
        out.push_back(w);
    }
    return out;
}

} // namespace roadhawk
