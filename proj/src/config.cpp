#include "ecgl/config.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <set>
#include <sstream>

#include <json.hpp>

namespace ecgl {

using nlohmann::json;

ConfigError::ConfigError(std::vector<std::string> v)
    : std::runtime_error("config error: " +
                         [&v] {
                             std::string s;
                             for (const auto& m : v) s += "\n  - " + m;
                             return s;
                         }()),
      violations(std::move(v)) {}

namespace {

struct Parser {
    std::vector<std::string> errors;

    void check_keys(const json& obj, const std::string& where,
                    const std::set<std::string>& allowed) {
        for (auto it = obj.begin(); it != obj.end(); ++it)
            if (!allowed.count(it.key()))
                errors.push_back(where + ": unknown key '" + it.key() + "'");
    }

    template <typename T>
    void get(const json& obj, const std::string& where, const std::string& key, T& out) {
        if (!obj.contains(key)) return;
        try {
            out = obj.at(key).get<T>();
        } catch (const json::exception&) {
            errors.push_back(where + "." + key + ": wrong type");
        }
    }

    void fail(const std::string& msg) { errors.push_back(msg); }
};

ExperimentKind parse_kind(const std::string& s, Parser& p) {
    if (s == "sweep") return ExperimentKind::DichotomySweep;
    if (s == "inviscid") return ExperimentKind::InviscidLimit;
    if (s == "decay") return ExperimentKind::DecayStudy;
    if (s == "gronwall") return ExperimentKind::WeakStrongGronwall;
    if (s == "trapping") return ExperimentKind::TrappingCheck;
    p.fail("experiment.kind: expected one of sweep|inviscid|decay|gronwall|trapping, got '" +
           s + "'");
    return ExperimentKind::DichotomySweep;
}

std::string kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::DichotomySweep: return "sweep";
        case ExperimentKind::InviscidLimit: return "inviscid";
        case ExperimentKind::DecayStudy: return "decay";
        case ExperimentKind::WeakStrongGronwall: return "gronwall";
        case ExperimentKind::TrappingCheck: return "trapping";
    }
    return "?";
}

InitialFamily parse_family(const std::string& s, Parser& p) {
    if (s == "truncated_w") return InitialFamily::TruncatedW;
    if (s == "gaussian") return InitialFamily::Gaussian;
    if (s == "ring") return InitialFamily::Ring;
    p.fail("experiment.family: expected one of truncated_w|gaussian|ring, got '" + s + "'");
    return InitialFamily::Gaussian;
}

std::string family_name(InitialFamily f) {
    switch (f) {
        case InitialFamily::TruncatedW: return "truncated_w";
        case InitialFamily::Gaussian: return "gaussian";
        case InitialFamily::Ring: return "ring";
    }
    return "?";
}

} // namespace

RunConfig parse_config_text(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::exception& e) {
        throw ConfigError({std::string("not valid JSON: ") + e.what()});
    }

    Parser p;
    RunConfig cfg;

    p.check_keys(root, "top level", {"grid", "z", "stepper", "experiment", "output"});

    if (root.contains("grid")) {
        const auto& g = root["grid"];
        p.check_keys(g, "grid", {"d", "n_per_axis", "half_length"});
        p.get(g, "grid", "d", cfg.grid.d);
        p.get(g, "grid", "n_per_axis", cfg.grid.n_per_axis);
        p.get(g, "grid", "half_length", cfg.grid.half_length);
    }
    if (root.contains("z")) {
        const auto& zb = root["z"];
        p.check_keys(zb, "z", {"theta"});
        p.get(zb, "z", "theta", cfg.theta);
    }
    if (root.contains("stepper")) {
        const auto& s = root["stepper"];
        p.check_keys(s, "stepper",
                     {"dt", "dt_min", "blowup_sup_threshold", "blowup_kinetic_factor",
                      "decay_h1_threshold", "max_time", "adaptive", "energy_increase_tol",
                      "linear_only", "event_check_cadence"});
        p.get(s, "stepper", "dt", cfg.stepper.dt);
        p.get(s, "stepper", "dt_min", cfg.stepper.dt_min);
        p.get(s, "stepper", "blowup_sup_threshold", cfg.stepper.blowup_sup_threshold);
        p.get(s, "stepper", "blowup_kinetic_factor", cfg.stepper.blowup_kinetic_factor);
        p.get(s, "stepper", "decay_h1_threshold", cfg.stepper.decay_h1_threshold);
        p.get(s, "stepper", "max_time", cfg.stepper.max_time);
        p.get(s, "stepper", "adaptive", cfg.stepper.adaptive);
        p.get(s, "stepper", "energy_increase_tol", cfg.stepper.energy_increase_tol);
        p.get(s, "stepper", "linear_only", cfg.stepper.linear_only);
        p.get(s, "stepper", "event_check_cadence", cfg.stepper.event_check_cadence);
    }
    if (root.contains("experiment")) {
        const auto& e = root["experiment"];
        p.check_keys(e, "experiment",
                     {"kind", "family", "sigma", "cutoff_radius", "taper_width",
                      "ring_radius", "amplitudes", "thetas", "seed", "epsilon",
                      "final_time", "m_list"});
        std::string kind = kind_name(cfg.experiment.kind);
        std::string family = family_name(cfg.experiment.family);
        p.get(e, "experiment", "kind", kind);
        p.get(e, "experiment", "family", family);
        cfg.experiment.kind = parse_kind(kind, p);
        cfg.experiment.family = parse_family(family, p);
        p.get(e, "experiment", "sigma", cfg.experiment.fparams.sigma);
        p.get(e, "experiment", "cutoff_radius", cfg.experiment.fparams.cutoff_radius);
        p.get(e, "experiment", "taper_width", cfg.experiment.fparams.taper_width);
        p.get(e, "experiment", "ring_radius", cfg.experiment.fparams.ring_radius);
        p.get(e, "experiment", "amplitudes", cfg.experiment.amplitudes);
        p.get(e, "experiment", "thetas", cfg.experiment.thetas);
        p.get(e, "experiment", "seed", cfg.experiment.seed);
        p.get(e, "experiment", "epsilon", cfg.experiment.epsilon);
        p.get(e, "experiment", "final_time", cfg.experiment.final_time);
        p.get(e, "experiment", "m_list", cfg.experiment.m_list);
    }
    if (root.contains("output")) {
        const auto& o = root["output"];
        p.check_keys(o, "output", {"directory", "record_cadence", "checkpoint_cadence"});
        p.get(o, "output", "directory", cfg.output.directory);
        p.get(o, "output", "record_cadence", cfg.output.record_cadence);
        p.get(o, "output", "checkpoint_cadence", cfg.output.checkpoint_cadence);
    }

    // Cross-field validation, mirroring the underlying type invariants.
    if (cfg.grid.d != 3 && cfg.grid.d != 4) p.fail("grid.d: must be 3 or 4");
    if (cfg.grid.n_per_axis < 8 || cfg.grid.n_per_axis % 2 != 0)
        p.fail("grid.n_per_axis: must be even and >= 8");
    if (!(cfg.grid.half_length > 0.0)) p.fail("grid.half_length: must be > 0");
    const double half_pi = std::numbers::pi / 2.0;
    if (!(cfg.theta > 0.0) || cfg.theta > half_pi + 1e-12)
        p.fail("z.theta: must lie in (0, pi/2]");
    if (!(cfg.stepper.dt > cfg.stepper.dt_min) || !(cfg.stepper.dt_min > 0.0))
        p.fail("stepper: need dt > dt_min > 0");
    if (!(cfg.stepper.blowup_sup_threshold > 0.0) ||
        !(cfg.stepper.blowup_kinetic_factor > 0.0) ||
        !(cfg.stepper.decay_h1_threshold > 0.0) || !(cfg.stepper.max_time > 0.0))
        p.fail("stepper: thresholds and max_time must be positive");
    if (cfg.stepper.event_check_cadence < 1) p.fail("stepper.event_check_cadence: must be >= 1");
    if (cfg.experiment.amplitudes.empty()) p.fail("experiment.amplitudes: must be nonempty");
    for (double th : cfg.experiment.thetas)
        if (!(th > 0.0) || th > half_pi + 1e-12)
            p.fail("experiment.thetas: every theta must lie in (0, pi/2]");
    if (cfg.experiment.kind == ExperimentKind::DichotomySweep &&
        cfg.experiment.thetas.empty())
        p.fail("experiment.thetas: must be nonempty for a sweep");
    if (!(cfg.experiment.final_time > 0.0)) p.fail("experiment.final_time: must be > 0");
    if (cfg.experiment.family == InitialFamily::TruncatedW &&
        cfg.experiment.fparams.cutoff_radius + cfg.experiment.fparams.taper_width >=
            cfg.grid.half_length)
        p.fail("experiment: cutoff_radius + taper_width must be < grid.half_length");
    if (cfg.output.record_cadence < 1) p.fail("output.record_cadence: must be >= 1");
    if (cfg.output.checkpoint_cadence < 0) p.fail("output.checkpoint_cadence: must be >= 0");

    if (!p.errors.empty()) throw ConfigError(std::move(p.errors));
    return cfg;
}

RunConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError({"cannot open config file: " + path});
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

std::string emit_config(const RunConfig& cfg) {
    json root;
    root["grid"] = {{"d", cfg.grid.d},
                    {"n_per_axis", cfg.grid.n_per_axis},
                    {"half_length", cfg.grid.half_length}};
    root["z"] = {{"theta", cfg.theta}};
    root["stepper"] = {{"dt", cfg.stepper.dt},
                       {"dt_min", cfg.stepper.dt_min},
                       {"blowup_sup_threshold", cfg.stepper.blowup_sup_threshold},
                       {"blowup_kinetic_factor", cfg.stepper.blowup_kinetic_factor},
                       {"decay_h1_threshold", cfg.stepper.decay_h1_threshold},
                       {"max_time", cfg.stepper.max_time},
                       {"adaptive", cfg.stepper.adaptive},
                       {"energy_increase_tol", cfg.stepper.energy_increase_tol},
                       {"linear_only", cfg.stepper.linear_only},
                       {"event_check_cadence", cfg.stepper.event_check_cadence}};
    root["experiment"] = {{"kind", kind_name(cfg.experiment.kind)},
                          {"family", family_name(cfg.experiment.family)},
                          {"sigma", cfg.experiment.fparams.sigma},
                          {"cutoff_radius", cfg.experiment.fparams.cutoff_radius},
                          {"taper_width", cfg.experiment.fparams.taper_width},
                          {"ring_radius", cfg.experiment.fparams.ring_radius},
                          {"amplitudes", cfg.experiment.amplitudes},
                          {"thetas", cfg.experiment.thetas},
                          {"seed", cfg.experiment.seed},
                          {"epsilon", cfg.experiment.epsilon},
                          {"final_time", cfg.experiment.final_time},
                          {"m_list", cfg.experiment.m_list}};
    root["output"] = {{"directory", cfg.output.directory},
                      {"record_cadence", cfg.output.record_cadence},
                      {"checkpoint_cadence", cfg.output.checkpoint_cadence}};
    return root.dump(2);
}

} // namespace ecgl
