#include "roadhawk/model_io.hpp"

#include "roadhawk/csv.hpp"

#include <json.hpp>

#include <fstream>

namespace roadhawk {

namespace {

using nlohmann::json;

json cache_to_json(const PiecewiseLinear& cache) {
    return json{{"lo", cache.lo}, {"hi", cache.hi}, {"values", cache.values}};
}

PiecewiseLinear cache_from_json(const json& j) {
    PiecewiseLinear out;
    out.lo = j.at("lo").get<double>();
    out.hi = j.at("hi").get<double>();
    out.values = j.at("values").get<std::vector<double>>();
    return out;
}

json component_to_json(const ComponentCurve& c) {
    return json{{"axis", axis_name(c.axis)},
                {"bandwidth", c.kernel.bandwidth},
                {"domain_len", c.domain_len},
                {"periodic", c.periodic},
                {"norm", c.norm},
                {"degenerate", c.degenerate},
                {"centers", c.centers},
                {"weights", c.weights},
                {"cache", cache_to_json(c.cache)}};
}

CurveAxis axis_from_name(const std::string& name) {
    if (name == "daily") return CurveAxis::daily;
    if (name == "weekly") return CurveAxis::weekly;
    if (name == "trend") return CurveAxis::trend;
    if (name == "spatial") return CurveAxis::spatial;
    throw Error("model document: unknown axis '" + name + "'");
}

ComponentCurve component_from_json(const json& j) {
    ComponentCurve c;
    c.axis = axis_from_name(j.at("axis").get<std::string>());
    c.domain_len = j.at("domain_len").get<double>();
    c.periodic = j.at("periodic").get<bool>();
    c.norm = j.at("norm").get<double>();
    c.degenerate = j.at("degenerate").get<bool>();
    c.centers = j.at("centers").get<std::vector<double>>();
    c.weights = j.at("weights").get<std::vector<double>>();
    c.cache = cache_from_json(j.at("cache"));
    c.kernel.bandwidth = j.at("bandwidth").get<double>();
    if (c.periodic) {
        c.kernel.kind = DomainKind::periodic;
        c.kernel.period = c.domain_len;
    } else {
        c.kernel.kind = DomainKind::truncated;
        c.kernel.lo = 0.0;
        c.kernel.hi = c.domain_len;
        c.kernel.mirror_lo = c.kernel.mirror_hi = true;
    }
    return c;
}

json trigger_to_json(const TriggerCurve& c) {
    return json{{"horizon", c.horizon},
                {"bandwidth", c.bandwidth},
                {"norm", c.norm},
                {"no_evidence", c.no_evidence},
                {"monotone_adjusted", c.monotone_adjusted},
                {"centers", c.centers},
                {"weights", c.weights},
                {"upper_limits", c.upper_limits},
                {"cache", cache_to_json(c.cache)}};
}

TriggerCurve trigger_from_json(const json& j) {
    TriggerCurve c;
    c.horizon = j.at("horizon").get<double>();
    c.bandwidth = j.at("bandwidth").get<double>();
    c.norm = j.at("norm").get<double>();
    c.no_evidence = j.at("no_evidence").get<bool>();
    c.monotone_adjusted = j.at("monotone_adjusted").get<bool>();
    c.centers = j.at("centers").get<std::vector<double>>();
    c.weights = j.at("weights").get<std::vector<double>>();
    c.upper_limits = j.at("upper_limits").get<std::vector<double>>();
    c.cache = cache_from_json(j.at("cache"));
    c.cumulative = c.cache.prefix_integral();
    return c;
}

} // namespace

void save_model(const ModelComponents& model, const std::filesystem::path& path) {
    json doc;
    doc["format"] = "roadhawk-model";
    doc["format_version"] = 1;
    doc["domain"] = json{{"t_len", model.domain.t_len},
                         {"x_len", model.domain.x_len},
                         {"day_min", model.domain.day_min},
                         {"week_min", model.domain.week_min},
                         {"spatial_ring", model.domain.spatial_ring}};
    doc["anchor_min"] = model.anchor_min;
    doc["mu0"] = model.mu0;
    doc["branching"] = model.branching;
    doc["enabled"] = json{{"daily", model.enabled.daily},
                          {"weekly", model.enabled.weekly},
                          {"trend", model.enabled.trend},
                          {"spatial", model.enabled.spatial},
                          {"triggering", model.enabled.triggering}};
    doc["config"] = json{{"bw_daily", model.config.bw_daily},
                         {"bw_weekly", model.config.bw_weekly},
                         {"bw_trend", model.config.bw_trend},
                         {"bw_spatial", model.config.bw_spatial},
                         {"bw_g", model.config.bw_g},
                         {"bw_h", model.config.bw_h},
                         {"trigger_horizon_t", model.config.trigger_horizon_t},
                         {"trigger_horizon_x", model.config.trigger_horizon_x},
                         {"mono_epsilon", model.config.mono_epsilon},
                         {"max_iters", model.config.max_iters},
                         {"tol", model.config.tol},
                         {"grid_dt", model.config.grid_dt},
                         {"grid_dx", model.config.grid_dx}};
    doc["components"] = json{{"daily", component_to_json(model.mu_d)},
                             {"weekly", component_to_json(model.mu_w)},
                             {"trend", component_to_json(model.mu_t)},
                             {"spatial", component_to_json(model.mu_s)}};
    doc["triggering"] = json{{"g", trigger_to_json(model.g)}, {"h", trigger_to_json(model.h)}};
    csv::write_atomic(path, doc.dump(1));
}

ModelComponents load_model(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw Error("cannot open '" + path.string() + "'");
    json doc;
    try {
        in >> doc;
    } catch (const json::exception& e) {
        throw Error("'" + path.string() + "': " + e.what());
    }
    if (doc.value("format", "") != "roadhawk-model")
        throw Error("'" + path.string() + "' is not a model document");

    ModelComponents model;
    const json& dom = doc.at("domain");
    model.domain.t_len = dom.at("t_len").get<double>();
    model.domain.x_len = dom.at("x_len").get<double>();
    model.domain.day_min = dom.at("day_min").get<double>();
    model.domain.week_min = dom.at("week_min").get<double>();
    model.domain.spatial_ring = dom.at("spatial_ring").get<bool>();
    model.anchor_min = doc.at("anchor_min").get<double>();
    model.mu0 = doc.at("mu0").get<double>();
    model.branching = doc.at("branching").get<double>();
    const json& en = doc.at("enabled");
    model.enabled.daily = en.at("daily").get<bool>();
    model.enabled.weekly = en.at("weekly").get<bool>();
    model.enabled.trend = en.at("trend").get<bool>();
    model.enabled.spatial = en.at("spatial").get<bool>();
    model.enabled.triggering = en.at("triggering").get<bool>();
    const json& cfg = doc.at("config");
    model.config.bw_daily = cfg.at("bw_daily").get<double>();
    model.config.bw_weekly = cfg.at("bw_weekly").get<double>();
    model.config.bw_trend = cfg.at("bw_trend").get<double>();
    model.config.bw_spatial = cfg.at("bw_spatial").get<double>();
    model.config.bw_g = cfg.at("bw_g").get<double>();
    model.config.bw_h = cfg.at("bw_h").get<double>();
    model.config.trigger_horizon_t = cfg.at("trigger_horizon_t").get<double>();
    model.config.trigger_horizon_x = cfg.at("trigger_horizon_x").get<double>();
    model.config.mono_epsilon = cfg.at("mono_epsilon").get<double>();
    model.config.max_iters = cfg.at("max_iters").get<int>();
    model.config.tol = cfg.at("tol").get<double>();
    model.config.grid_dt = cfg.at("grid_dt").get<double>();
    model.config.grid_dx = cfg.at("grid_dx").get<double>();
    const json& comp = doc.at("components");
    model.mu_d = component_from_json(comp.at("daily"));
    model.mu_w = component_from_json(comp.at("weekly"));
    model.mu_t = component_from_json(comp.at("trend"));
    model.mu_s = component_from_json(comp.at("spatial"));
    const json& trig = doc.at("triggering");
    model.g = trigger_from_json(trig.at("g"));
    model.h = trigger_from_json(trig.at("h"));
    return model;
}

} // namespace roadhawk
