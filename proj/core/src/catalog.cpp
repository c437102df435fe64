#include "roadhawk/catalog.hpp"

#include "roadhawk/csv.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <sstream>

namespace roadhawk {

void StudyDomain::validate() const {
    if (!(t_len > 0.0)) throw Error("study domain: T must be positive");
    if (!(x_len > 0.0)) throw Error("study domain: X must be positive");
    if (!(day_min > 0.0)) throw Error("study domain: day length must be positive");
    if (std::abs(week_min - 7.0 * day_min) > 1e-9)
        throw Error("study domain: week length must equal 7 days");
}

void EventCatalog::validate() const {
    domain.validate();
    for (std::size_t i = 0; i < events.size(); ++i) {
        const Event& e = events[i];
        if (!std::isfinite(e.t) || !std::isfinite(e.x))
            throw Error("catalog: non-finite coordinates at index " + std::to_string(i));
        if (e.t < 0.0 || e.t > domain.t_len || e.x < 0.0 || e.x > domain.x_len)
            throw Error("catalog: event outside study domain at index " + std::to_string(i));
        if (i > 0) {
            const Event& p = events[i - 1];
            if (p.t > e.t || (p.t == e.t && p.x > e.x))
                throw Error("catalog: events not sorted at index " + std::to_string(i));
        }
    }
}

double EventCatalog::daily_phase(double t) const {
    double p = std::fmod(t + anchor_min, domain.day_min);
    if (p < 0.0) p += domain.day_min;
    return p;
}

double EventCatalog::weekly_phase(double t) const {
    double p = std::fmod(t + anchor_min, domain.week_min);
    if (p < 0.0) p += domain.week_min;
    return p;
}

void FitConfig::validate() const {
    auto positive = [](double v, const char* name) {
        if (!(v > 0.0)) throw Error(std::string("fit config: ") + name + " must be positive");
    };
    positive(bw_daily, "daily bandwidth");
    positive(bw_weekly, "weekly bandwidth");
    positive(bw_trend, "trend bandwidth");
    positive(bw_spatial, "spatial bandwidth");
    positive(bw_g, "temporal triggering bandwidth");
    positive(bw_h, "spatial triggering bandwidth");
    positive(trigger_horizon_t, "temporal triggering horizon");
    positive(trigger_horizon_x, "spatial triggering horizon");
    positive(tol, "tolerance");
    positive(grid_dt, "temporal grid step");
    positive(grid_dx, "spatial grid step");
    if (mono_epsilon < 0.0) throw Error("fit config: monotone epsilon must be nonnegative");
    if (init_branching < 0.0 || init_branching >= 1.0)
        throw Error("fit config: initial branching must lie in [0, 1)");
    if (max_iters < 1) throw Error("fit config: max iterations must be at least 1");
}

void sort_events(std::vector<Event>& events) {
    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        if (a.t != b.t) return a.t < b.t;
        return a.x < b.x;
    });
}

double parse_anchor(const std::string& weekday, int hour, int minute) {
    static const std::array<const char*, 7> names = {"monday",   "tuesday", "wednesday", "thursday",
                                                     "friday",   "saturday", "sunday"};
    std::string lower;
    for (char c : weekday) lower.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
    for (std::size_t i = 0; i < names.size(); ++i) {
        if (lower == names[i]) {
            if (hour < 0 || hour > 23 || minute < 0 || minute > 59)
                throw Error("anchor: time of day out of range");
            return static_cast<double>(i) * 1440.0 + hour * 60.0 + minute;
        }
    }
    throw Error("anchor: unknown weekday '" + weekday + "'");
}

namespace {

bool parse_anchor_comment(const std::string& body, double& anchor_out) {
    // body looks like "wednesday,08:30"
    auto comma = body.find(',');
    if (comma == std::string::npos) return false;
    std::string day = body.substr(0, comma);
    std::string hm = body.substr(comma + 1);
    auto colon = hm.find(':');
    if (colon == std::string::npos) return false;
    int hour = 0, minute = 0;
    try {
        hour = std::stoi(hm.substr(0, colon));
        minute = std::stoi(hm.substr(colon + 1));
    } catch (const std::exception&) {
        return false;
    }
    anchor_out = parse_anchor(day, hour, minute);
    return true;
}

std::string strip_cr(std::string s) {
    if (!s.empty() && s.back() == '\r') s.pop_back();
    return s;
}

} // namespace

DomainHints read_domain_hints(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    DomainHints hints;
    std::string line;
    while (std::getline(in, line)) {
        line = strip_cr(line);
        if (line.empty()) continue;
        if (line[0] != '#') break;
        auto eq = line.find('=');
        if (eq == std::string::npos) continue;
        std::string key = line.substr(1, eq - 1);
        std::string value = line.substr(eq + 1);
        if (key == "T") {
            hints.t_len = csv::parse_double(value, 0);
            hints.has_t = true;
        } else if (key == "X") {
            hints.x_len = csv::parse_double(value, 0);
            hints.has_x = true;
        } else if (key == "ring") {
            hints.ring = (value == "1" || value == "true");
            hints.has_ring = true;
        } else if (key == "anchor") {
            if (parse_anchor_comment(value, hints.anchor_min)) hints.has_anchor = true;
        }
    }
    return hints;
}

EventCatalog load_catalog(const std::filesystem::path& path, const StudyDomain& domain,
                          LoadReport* report) {
    domain.validate();
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");

    EventCatalog catalog;
    catalog.domain = domain;

    std::string line;
    long line_no = 0;
    bool header_seen = false;
    while (std::getline(in, line)) {
        ++line_no;
        line = strip_cr(line);
        if (line.empty()) continue;
        if (line[0] == '#') {
            auto eq = line.find('=');
            if (eq != std::string::npos && line.substr(1, eq - 1) == "anchor") {
                double anchor = 0.0;
                if (parse_anchor_comment(line.substr(eq + 1), anchor)) catalog.anchor_min = anchor;
            }
            continue;
        }
        if (!header_seen) {
            auto fields = csv::split(line);
            if (fields.size() < 2 || strip_cr(fields[0]) != "t_min" || strip_cr(fields[1]) != "x_m")
                throw Error("line " + std::to_string(line_no) + ": expected header 't_min,x_m'");
            header_seen = true;
            continue;
        }
        auto fields = csv::split(line);
        if (fields.size() < 2)
            throw Error("line " + std::to_string(line_no) + ": expected at least two fields");
        Event e;
        e.t = csv::parse_double(fields[0], line_no);
        e.x = csv::parse_double(fields[1], line_no);
        if (!std::isfinite(e.t) || !std::isfinite(e.x)) {
            if (report) report->rejected.push_back({line_no, "non-finite coordinates"});
            continue;
        }
        if (e.t < 0.0 || e.t > domain.t_len || e.x < 0.0 || e.x > domain.x_len) {
            if (report) report->rejected.push_back({line_no, "outside study domain"});
            continue;
        }
        catalog.events.push_back(e);
    }
    if (!header_seen) throw Error("'" + path.string() + "': empty catalog");
    if (catalog.events.empty()) throw Error("'" + path.string() + "': empty catalog");
    sort_events(catalog.events);
    return catalog;
}

void save_catalog(const EventCatalog& catalog, const std::filesystem::path& path,
                  std::span<const int> generation, std::span<const long> parent) {
    const bool provenance = !generation.empty();
    if (provenance && (generation.size() != catalog.events.size() || parent.size() != catalog.events.size()))
        throw Error("save_catalog: provenance length mismatch");

    std::ostringstream out;
    out << "#T=" << csv::format_double(catalog.domain.t_len) << "\n";
    out << "#X=" << csv::format_double(catalog.domain.x_len) << "\n";
    out << "#ring=" << (catalog.domain.spatial_ring ? 1 : 0) << "\n";
    if (catalog.anchor_min != 0.0) {
        static const std::array<const char*, 7> names = {"monday",   "tuesday",  "wednesday",
                                                         "thursday", "friday",   "saturday",
                                                         "sunday"};
        long total = static_cast<long>(catalog.anchor_min);
        long day = total / 1440;
        long hour = (total % 1440) / 60;
        long minute = total % 60;
        out << "#anchor=" << names[static_cast<std::size_t>(day % 7)] << ",";
        char buf[8];
        std::snprintf(buf, sizeof(buf), "%02ld:%02ld", hour, minute);
        out << buf << "\n";
    }
    out << (provenance ? "t_min,x_m,gen,parent" : "t_min,x_m") << "\n";
    for (std::size_t i = 0; i < catalog.events.size(); ++i) {
        out << csv::format_double(catalog.events[i].t) << ","
            << csv::format_double(catalog.events[i].x);
        if (provenance) out << "," << generation[i] << "," << parent[i];
        out << "\n";
    }
    csv::write_atomic(path, out.str());
}

} // namespace roadhawk
