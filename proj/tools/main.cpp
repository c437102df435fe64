#include "roadhawk/background.hpp"
#include "roadhawk/catalog.hpp"
#include "roadhawk/csv.hpp"
#include "roadhawk/fitter.hpp"
#include "roadhawk/localizer.hpp"
#include "roadhawk/model_io.hpp"
#include "roadhawk/simulator.hpp"
#include "roadhawk/validation.hpp"
#include "roadhawk/version.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <sstream>

namespace {

using namespace roadhawk;
namespace fs = std::filesystem;

struct DomainFlags {
    double t_len = 0.0;
    double x_len = 0.0;
    bool ring = false;
    bool ring_set = false;
};

void add_domain_flags(CLI::App* cmd, DomainFlags& flags) {
    cmd->add_option("--T-min", flags.t_len, "Study window length in minutes");
    cmd->add_option("--X-m", flags.x_len, "Roadway length in meters");
    cmd->add_flag_callback(
        "--ring", [&flags]() { flags.ring = flags.ring_set = true; },
        "Treat the spatial domain as a ring");
}

StudyDomain resolve_domain(const fs::path& events, const DomainFlags& flags) {
    DomainHints hints = read_domain_hints(events);
    StudyDomain dom;
    dom.t_len = flags.t_len > 0.0 ? flags.t_len : (hints.has_t ? hints.t_len : 0.0);
    dom.x_len = flags.x_len > 0.0 ? flags.x_len : (hints.has_x ? hints.x_len : 0.0);
    dom.spatial_ring = flags.ring_set ? flags.ring : (hints.has_ring && hints.ring);
    if (!(dom.t_len > 0.0) || !(dom.x_len > 0.0))
        throw Error("study domain unknown: pass --T-min/--X-m or use a CSV with #T=/#X= hints");
    return dom;
}

struct FitFlags {
    FitConfig config;
    std::vector<std::string> disable;
    std::string sweep;
};

void add_fit_flags(CLI::App* cmd, FitFlags& flags) {
    cmd->add_option("--bandwidth-daily", flags.config.bw_daily, "Daily bandwidth, minutes");
    cmd->add_option("--bandwidth-weekly", flags.config.bw_weekly, "Weekly bandwidth, minutes");
    cmd->add_option("--bandwidth-trend", flags.config.bw_trend, "Trend bandwidth, minutes");
    cmd->add_option("--bandwidth-spatial", flags.config.bw_spatial, "Spatial bandwidth, meters");
    cmd->add_option("--bandwidth-g", flags.config.bw_g, "Temporal triggering bandwidth, minutes");
    cmd->add_option("--bandwidth-h", flags.config.bw_h, "Spatial triggering bandwidth, meters");
    cmd->add_option("--horizon-t", flags.config.trigger_horizon_t,
                    "Temporal triggering horizon, minutes");
    cmd->add_option("--horizon-x", flags.config.trigger_horizon_x,
                    "Spatial triggering horizon, meters");
    cmd->add_option("--mono-epsilon", flags.config.mono_epsilon,
                    "Slope bound for the monotone adjustment");
    cmd->add_option("--max-iters", flags.config.max_iters, "Iteration cap");
    cmd->add_option("--tol", flags.config.tol, "Convergence tolerance");
    cmd->add_option("--grid-dt", flags.config.grid_dt, "Temporal cache step, minutes");
    cmd->add_option("--grid-dx", flags.config.grid_dx, "Spatial cache step, meters");
    cmd->add_option("--disable", flags.disable,
                    "Disable components: daily, weekly, trend, spatial, triggering")
        ->delimiter(',');
}

ComponentFlags resolve_flags(const std::vector<std::string>& disable) {
    ComponentFlags flags;
    for (const std::string& name : disable) {
        if (name == "daily")
            flags.daily = false;
        else if (name == "weekly")
            flags.weekly = false;
        else if (name == "trend")
            flags.trend = false;
        else if (name == "spatial")
            flags.spatial = false;
        else if (name == "triggering")
            flags.triggering = false;
        else
            throw Error("unknown component '" + name + "' in --disable");
    }
    return flags;
}

std::string curve_csv(const ComponentCurve& curve) {
    std::ostringstream out;
    out << "coord,value\n";
    for (std::size_t m = 0; m < curve.cache.size(); ++m)
        out << csv::format_double(curve.cache.coord(m)) << ","
            << csv::format_double(curve.cache.values[m]) << "\n";
    return out.str();
}

std::string trigger_csv(const TriggerCurve& curve) {
    std::ostringstream out;
    out << "lag,value\n";
    for (std::size_t m = 0; m < curve.cache.size(); ++m)
        out << csv::format_double(curve.cache.coord(m)) << ","
            << csv::format_double(curve.cache.values[m]) << "\n";
    return out.str();
}

void write_curves(const ModelComponents& model, const fs::path& dir) {
    csv::write_atomic(dir / "daily.csv", curve_csv(model.mu_d));
    csv::write_atomic(dir / "weekly.csv", curve_csv(model.mu_w));
    csv::write_atomic(dir / "trend.csv", curve_csv(model.mu_t));
    csv::write_atomic(dir / "spatial.csv", curve_csv(model.mu_s));
    csv::write_atomic(dir / "g.csv", trigger_csv(model.g));
    csv::write_atomic(dir / "h.csv", trigger_csv(model.h));
}

void write_fit_report(const FitReport& report, const fs::path& path) {
    std::ostringstream out;
    out << "iter,A,mu0,loglik,max_dpsi,max_partition_residual\n";
    for (std::size_t i = 0; i < report.iterations.size(); ++i) {
        const FitIteration& row = report.iterations[i];
        out << (i + 1) << "," << csv::format_double(row.branching) << ","
            << csv::format_double(row.mu0) << "," << csv::format_double(row.loglik) << ","
            << csv::format_double(row.max_dpsi) << ","
            << csv::format_double(row.max_partition_residual) << "\n";
    }
    csv::write_atomic(path, out.str());
}

void write_validation(const ValidationReport& report, const fs::path& dir) {
    std::vector<double> sorted(report.z);
    std::sort(sorted.begin(), sorted.end());
    const double n = static_cast<double>(sorted.size());
    std::ostringstream cdf;
    cdf << "z,empirical,lo95,hi95,lo99,hi99\n";
    for (std::size_t i = 0; i < sorted.size(); ++i) {
        const double z = sorted[i];
        auto clamp01 = [](double v) { return std::min(1.0, std::max(0.0, v)); };
        cdf << csv::format_double(z) << ","
            << csv::format_double(static_cast<double>(i + 1) / n) << ","
            << csv::format_double(clamp01(z - report.band95)) << ","
            << csv::format_double(clamp01(z + report.band95)) << ","
            << csv::format_double(clamp01(z - report.band99)) << ","
            << csv::format_double(clamp01(z + report.band99)) << "\n";
    }
    csv::write_atomic(dir / "cdf.csv", cdf.str());

    std::ostringstream qq;
    qq << "k,observed,expected,lo,hi\n";
    for (const QQPoint& q : report.qq)
        qq << q.k << "," << csv::format_double(q.observed) << ","
           << csv::format_double(q.expected) << "," << csv::format_double(q.lo) << ","
           << csv::format_double(q.hi) << "\n";
    csv::write_atomic(dir / "qq.csv", qq.str());
}

int cmd_simulate(const fs::path& model_path, const fs::path& out_dir, std::uint64_t seed,
                 const DomainFlags& domain_flags, bool provenance) {
    ModelComponents model = load_model(model_path);
    SimSpec spec = make_sim_spec(model, seed);
    if (domain_flags.t_len > 0.0) spec.domain.t_len = domain_flags.t_len;
    if (domain_flags.x_len > 0.0) spec.domain.x_len = domain_flags.x_len;
    if (domain_flags.ring_set) spec.domain.spatial_ring = domain_flags.ring;
    SimResult sim = simulate(spec);
    fs::create_directories(out_dir);
    if (provenance)
        save_catalog(sim.catalog, out_dir / "events.csv", sim.generation, sim.parent);
    else
        save_catalog(sim.catalog, out_dir / "events.csv");
    std::printf("simulated %zu events (seed %llu) -> %s\n", sim.catalog.size(),
                static_cast<unsigned long long>(seed),
                (out_dir / "events.csv").string().c_str());
    return 0;
}

int cmd_fit(const fs::path& events, const fs::path& out_dir, const DomainFlags& domain_flags,
            const FitFlags& fit_flags) {
    StudyDomain dom = resolve_domain(events, domain_flags);
    LoadReport load_report;
    EventCatalog catalog = load_catalog(events, dom, &load_report);
    for (const RowReject& r : load_report.rejected)
        std::fprintf(stderr, "warning: line %ld rejected (%s)\n", r.line, r.reason.c_str());
    ComponentFlags flags = resolve_flags(fit_flags.disable);

    if (!fit_flags.sweep.empty()) {
        auto eq = fit_flags.sweep.find('=');
        if (eq == std::string::npos) throw Error("--bandwidth-sweep expects name=v1,v2,...");
        const std::string name = fit_flags.sweep.substr(0, eq);
        std::ostringstream table;
        table << "bandwidth,A,loglik,converged\n";
        for (const std::string& field : csv::split(fit_flags.sweep.substr(eq + 1))) {
            FitConfig cfg = fit_flags.config;
            const double value = csv::parse_double(field, 0);
            if (name == "daily")
                cfg.bw_daily = value;
            else if (name == "weekly")
                cfg.bw_weekly = value;
            else if (name == "trend")
                cfg.bw_trend = value;
            else if (name == "spatial")
                cfg.bw_spatial = value;
            else if (name == "g")
                cfg.bw_g = value;
            else if (name == "h")
                cfg.bw_h = value;
            else
                throw Error("unknown bandwidth '" + name + "' in sweep");
            auto [model, report] = fit(catalog, cfg, flags);
            table << csv::format_double(value) << "," << csv::format_double(model.branching)
                  << "," << csv::format_double(report.loglik) << ","
                  << (report.converged ? 1 : 0) << "\n";
            std::printf("sweep %s=%s: loglik %.4f\n", name.c_str(), field.c_str(),
                        report.loglik);
        }
        fs::create_directories(out_dir);
        csv::write_atomic(out_dir / "sweep.csv", table.str());
        return 0;
    }

    auto [model, report] = fit(catalog, fit_flags.config, flags);
    fs::create_directories(out_dir);
    save_model(model, out_dir / "model.json");
    write_curves(model, out_dir);
    write_fit_report(report, out_dir / "fit_report.csv");
    std::printf("fit: %zu events, %zu iterations, %s, A=%.6f, mu0=%.6g, loglik=%.4f\n",
                catalog.size(), report.iterations.size(),
                report.converged ? "converged" : "not converged", model.branching, model.mu0,
                report.loglik);
    return 0;
}

int cmd_validate(const fs::path& events, const fs::path& model_path, const fs::path& out_dir,
                 const DomainFlags& domain_flags, const std::string& mode_name) {
    ModelComponents model = load_model(model_path);
    DomainHints hints = read_domain_hints(events);
    StudyDomain dom;
    dom.t_len = domain_flags.t_len > 0.0 ? domain_flags.t_len
                                         : (hints.has_t ? hints.t_len : model.domain.t_len);
    dom.x_len = domain_flags.x_len > 0.0 ? domain_flags.x_len
                                         : (hints.has_x ? hints.x_len : model.domain.x_len);
    dom.spatial_ring = domain_flags.ring_set
                           ? domain_flags.ring
                           : (hints.has_ring ? hints.ring : model.domain.spatial_ring);
    EventCatalog catalog = load_catalog(events, dom);

    ValidationMode mode;
    if (mode_name == "in-sample")
        mode = ValidationMode::in_sample;
    else if (mode_name == "out-of-sample")
        mode = ValidationMode::out_of_sample;
    else
        throw Error("--mode must be in-sample or out-of-sample");

    ValidationReport report = validate(model, catalog, mode);
    fs::create_directories(out_dir);
    write_validation(report, out_dir);
    std::printf("validate (%s): n=%zu ks=%.5f band95=%.5f band99=%.5f -> %s\n",
                mode_name.c_str(), report.z.size(), report.ks_stat, report.band95, report.band99,
                report.pass95 ? "pass" : "fail");
    if (report.small_n)
        std::fprintf(stderr, "warning: n < 35, the asymptotic KS band is biased\n");
    return report.pass95 ? 0 : 2;
}

int cmd_localize(const fs::path& loops_path, const fs::path& windows_path, const fs::path& out_dir,
                 double threshold_pct, bool use_top5) {
    LoopNetwork network = load_loops(loops_path);
    std::vector<EventWindow> windows = load_windows(windows_path);
    const EisAggregation aggregation = use_top5 ? EisAggregation::top5_mean : EisAggregation::max;

    std::ostringstream out;
    const bool with_filter = threshold_pct >= 0.0;
    out << "t_start,t_end,x_lo,x_hi,pos_m,low_confidence,eis";
    if (with_filter) out << ",max_drop_pct,kept";
    out << "\n";
    std::size_t kept = 0;
    for (const EventWindow& w : windows) {
        LocalizeResult res = localize(w, network, aggregation);
        out << csv::format_double(w.t_start) << "," << csv::format_double(w.t_end) << ","
            << csv::format_double(w.x_lo) << "," << csv::format_double(w.x_hi) << ","
            << csv::format_double(res.position_m) << "," << (res.low_confidence ? 1 : 0) << ","
            << csv::format_double(res.best_eis);
        if (with_filter) {
            auto link = link_speed_series(network, w.x_lo, w.x_hi);
            SeasonalTable profile = seasonal_median(link, network.start_min, network.anchor_min);
            SignificanceResult sig = significance_filter(link, network.start_min, profile,
                                                         network.anchor_min, w, threshold_pct);
            out << "," << csv::format_double(sig.max_drop_pct) << "," << (sig.keep ? 1 : 0);
            if (sig.keep) ++kept;
        }
        out << "\n";
    }
    fs::create_directories(out_dir);
    csv::write_atomic(out_dir / "localized.csv", out.str());
    std::printf("localized %zu windows -> %s", windows.size(),
                (out_dir / "localized.csv").string().c_str());
    if (with_filter) std::printf(" (%zu kept at %.0f%%)", kept, threshold_pct);
    std::printf("\n");
    return 0;
}

int cmd_report(const fs::path& events, const fs::path& out_dir, const DomainFlags& domain_flags,
               const FitFlags& fit_flags) {
    StudyDomain dom = resolve_domain(events, domain_flags);
    EventCatalog catalog = load_catalog(events, dom);

    struct Row {
        const char* name;
        bool trend;
        bool triggering;
    };
    const Row rows[] = {
        {"Daily + Weekly Background", false, false},
        {"Daily + Weekly + Trend Background", true, false},
        {"Daily + Weekly + Triggering", false, true},
        {"Daily + Weekly + Trend + Triggering", true, true},
    };

    std::ostringstream table;
    table << "model,A,loglik\n";
    const double ll_homog = homogeneous_log_likelihood(catalog);
    table << "Fixed Rate Poisson Process,," << csv::format_double(ll_homog) << "\n";
    std::printf("%-40s %-10s %s\n", "Model", "A", "Log-Likelihood");
    std::printf("%-40s %-10s %.2f\n", "Fixed Rate Poisson Process", "-", ll_homog);

    ModelComponents full_model;
    bool have_full = false;
    for (const Row& row : rows) {
        ComponentFlags flags = resolve_flags(fit_flags.disable);
        flags.trend = row.trend;
        flags.triggering = row.triggering;
        auto [model, report] = fit(catalog, fit_flags.config, flags);
        table << row.name << ",";
        if (row.triggering) table << csv::format_double(model.branching);
        table << "," << csv::format_double(report.loglik) << "\n";
        if (row.triggering)
            std::printf("%-40s %-10.6f %.2f\n", row.name, model.branching, report.loglik);
        else
            std::printf("%-40s %-10s %.2f\n", row.name, "-", report.loglik);
        if (row.trend && row.triggering) {
            full_model = std::move(model);
            have_full = true;
        }
    }
    fs::create_directories(out_dir);
    csv::write_atomic(out_dir / "report.csv", table.str());

    if (have_full) {
        std::ostringstream hotspots;
        hotspots << "start_m,end_m\n";
        for (const Hotspot& h : extract_hotspots(full_model.mu_s, dom.spatial_ring))
            hotspots << csv::format_double(h.start_m) << "," << csv::format_double(h.end_m)
                     << "\n";
        csv::write_atomic(out_dir / "hotspots.csv", hotspots.str());

        const double mass_100 = full_model.branching * full_model.g.integral_to(100.0);
        std::ostringstream summary;
        summary << "quantity,value\n";
        summary << "A," << csv::format_double(full_model.branching) << "\n";
        summary << "triggered_mass_within_100min," << csv::format_double(mass_100) << "\n";
        csv::write_atomic(out_dir / "triggering_summary.csv", summary.str());
        std::printf("triggered fraction A=%.6f, mass within 100 min %.6f\n",
                    full_model.branching, mass_100);
        save_model(full_model, out_dir / "model.json");
    }
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Self-exciting spatio-temporal point process toolkit for roadway incidents"};
    app.set_version_flag("--version", std::string("roadhawk ") + ROADHAWK_VERSION);
    app.set_config("--config", "", "Flat key=value configuration file (flags win)");
    app.require_subcommand(1);

    auto* sim = app.add_subcommand("simulate", "Sample a catalog from a model document");
    fs::path sim_model, sim_out = ".";
    std::uint64_t sim_seed = 0;
    bool sim_prov = false;
    DomainFlags sim_domain;
    sim->add_option("--model", sim_model, "Model document (JSON)")->required();
    sim->add_option("--out-dir", sim_out, "Output directory");
    sim->add_option("--seed", sim_seed, "Random seed");
    sim->add_flag("--provenance", sim_prov, "Emit gen,parent columns");
    add_domain_flags(sim, sim_domain);

    auto* fit_cmd = app.add_subcommand("fit", "Fit the model to an event catalog");
    fs::path fit_events, fit_out = ".";
    DomainFlags fit_domain;
    FitFlags fit_flags;
    fit_cmd->add_option("--events", fit_events, "Event CSV")->required();
    fit_cmd->add_option("--out-dir", fit_out, "Output directory");
    add_domain_flags(fit_cmd, fit_domain);
    add_fit_flags(fit_cmd, fit_flags);
    fit_cmd->add_option("--bandwidth-sweep", fit_flags.sweep,
                        "Refit across bandwidths: name=v1,v2,...");

    auto* val = app.add_subcommand("validate", "Time-rescaling residual validation");
    fs::path val_events, val_model, val_out = ".";
    std::string val_mode = "in-sample";
    DomainFlags val_domain;
    val->add_option("--events", val_events, "Event CSV")->required();
    val->add_option("--model", val_model, "Model document (JSON)")->required();
    val->add_option("--out-dir", val_out, "Output directory");
    val->add_option("--mode", val_mode, "in-sample or out-of-sample");
    add_domain_flags(val, val_domain);

    auto* loc = app.add_subcommand("localize", "Locate events between loop sensors");
    fs::path loc_loops, loc_windows, loc_out = ".";
    double loc_threshold = -1.0;
    bool loc_top5 = false;
    loc->add_option("--loops", loc_loops, "Loop CSV")->required();
    loc->add_option("--windows", loc_windows, "Event-window CSV")->required();
    loc->add_option("--out-dir", loc_out, "Output directory");
    loc->add_option("--threshold-pct", loc_threshold,
                    "Speed-drop significance threshold (enables the filter)");
    loc->add_flag("--eis-top5", loc_top5, "Aggregate EIS as mean of the top 5 minutes");

    auto* rep = app.add_subcommand("report", "Nested-model comparison and hotspots");
    fs::path rep_events, rep_out = ".";
    DomainFlags rep_domain;
    FitFlags rep_flags;
    rep->add_option("--events", rep_events, "Event CSV")->required();
    rep->add_option("--out-dir", rep_out, "Output directory");
    add_domain_flags(rep, rep_domain);
    add_fit_flags(rep, rep_flags);

    CLI11_PARSE(app, argc, argv);

    try {
        if (sim->parsed())
            return cmd_simulate(sim_model, sim_out, sim_seed, sim_domain, sim_prov);
        if (fit_cmd->parsed()) return cmd_fit(fit_events, fit_out, fit_domain, fit_flags);
        if (val->parsed())
            return cmd_validate(val_events, val_model, val_out, val_domain, val_mode);
        if (loc->parsed())
            return cmd_localize(loc_loops, loc_windows, loc_out, loc_threshold, loc_top5);
        if (rep->parsed()) return cmd_report(rep_events, rep_out, rep_domain, rep_flags);
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 1;
}
