#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "json.hpp"
#include "patchlv/bounds.hpp"
#include "patchlv/coeffs.hpp"
#include "patchlv/csv.hpp"
#include "patchlv/integrator.hpp"
#include "patchlv/model.hpp"

namespace patchlv {

class ConfigError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

struct SimulateOptions {
    double t_end = 100.0;
};

struct RegionOptions {
    std::uint64_t seed = 42;
    std::size_t ensemble_size = 16;
    ComponentBounds ic_box{0.1, 5.0};
    double burn_in = 100.0;
    double horizon = 300.0;
    double margin = 0.05;
};

struct DecayOptions {
    State shadow{2.0, 0.5, 1.5, 0.8};  // compared against the first initial state
    double t_start = 100.0;
    double t_end = 200.0;
    double tol = 1e-8;
};

struct AttractOptions {
    double t_end = 300.0;
    double eps = 1e-3;
};

struct ScanOptions {
    double window_start = 100.0;
    double window_end = 150.0;
    double shift_min = 150.0;
    double shift_max = 200.0;
    double shift_step = 0.01;
    double epsilon = 0.2;
};

/// Everything one experiment run needs: the model, initial states, stepping
/// controls, and per-subcommand knobs. All sections except params and
/// initial_states are optional in the JSON form and fall back to these
/// defaults.
struct Scenario {
    SystemParams params;
    std::vector<State> initial_states;
    IntegrationOptions integration{StepMethod::rk4, 1e-3, 1e-6, 1e-9, 100};
    SimulateOptions simulate;
    RegionOptions region;
    DecayOptions decay;
    AttractOptions attract;
    ScanOptions scan;
    std::string output_dir = "out";
};

namespace detail {

using nlohmann::json;

inline double parse_frequency(const json& j, const std::string& where) {
    if (j.is_string()) {
        if (j.get<std::string>() == "sqrt2") return std::sqrt(2.0);
        throw ConfigError(where + ": unknown frequency token '" + j.get<std::string>() +
                          "' (only \"sqrt2\" is recognized)");
    }
    if (j.is_number()) return j.get<double>();
    throw ConfigError(where + ": frequency must be a number or \"sqrt2\"");
}

inline json frequency_to_json(double f) {
    if (f == std::sqrt(2.0)) return json("sqrt2");
    return json(f);
}

inline double require_number(const json& j, const std::string& key, const std::string& where) {
    if (!j.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    if (!j.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline double optional_number(const json& j, const std::string& key, double fallback,
                              const std::string& where) {
    if (!j.contains(key)) return fallback;
    if (!j.at(key).is_number()) throw ConfigError(where + ": '" + key + "' must be a number");
    return j.at(key).get<double>();
}

inline QuasiPeriodicCoefficient parse_coefficient(const json& j, const std::string& where) {
    if (j.is_number()) return constant_coeff(j.get<double>());
    if (!j.is_object()) throw ConfigError(where + ": must be a number or an object");
    QuasiPeriodicCoefficient coeff;
    coeff.constant = require_number(j, "constant", where);
    if (j.contains("terms")) {
        if (!j.at("terms").is_array()) throw ConfigError(where + ": 'terms' must be an array");
        std::size_t i = 0;
        for (const json& jt : j.at("terms")) {
            const std::string term_where = where + ".terms[" + std::to_string(i++) + "]";
            if (!jt.is_object()) throw ConfigError(term_where + ": must be an object");
            CoeffTerm term;
            term.amplitude = require_number(jt, "amplitude", term_where);
            if (!jt.contains("frequency"))
                throw ConfigError(term_where + ": missing key 'frequency'");
            term.frequency = parse_frequency(jt.at("frequency"), term_where);
            const std::string kind =
                jt.contains("kind") ? jt.at("kind").get<std::string>() : "sin";
            if (kind == "sin") {
                term.kind = PhaseKind::sine;
            } else if (kind == "cos") {
                term.kind = PhaseKind::cosine;
            } else {
                throw ConfigError(term_where + ": kind must be \"sin\" or \"cos\"");
            }
            coeff.terms.push_back(term);
        }
    }
    return coeff;
}

inline json coefficient_to_json(const QuasiPeriodicCoefficient& coeff) {
    if (coeff.terms.empty()) return json(coeff.constant);
    json j;
    j["constant"] = coeff.constant;
    j["terms"] = json::array();
    for (const CoeffTerm& term : coeff.terms) {
        json jt;
        jt["amplitude"] = term.amplitude;
        jt["frequency"] = frequency_to_json(term.frequency);
        jt["kind"] = term.kind == PhaseKind::sine ? "sin" : "cos";
        j["terms"].push_back(jt);
    }
    return j;
}

inline State parse_state(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 4)
        throw ConfigError(where + ": must be an array of 4 numbers [x1, y1, x2, y2]");
    Vec4 v;
    for (std::size_t i = 0; i < 4; ++i) {
        if (!j.at(i).is_number()) throw ConfigError(where + ": entries must be numbers");
        v[i] = j.at(i).get<double>();
    }
    return state_from_array(v);
}

inline json state_to_json(const State& z) { return json::array({z.x1, z.y1, z.x2, z.y2}); }

}  // namespace detail

inline Scenario scenario_from_json(const nlohmann::json& j) {
    using detail::optional_number;
    using detail::require_number;
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    if (!j.contains("params") || !j.at("params").is_object())
        throw ConfigError("config: missing 'params' object");

    Scenario sc;
    const nlohmann::json& jp = j.at("params");
    const std::pair<const char*, QuasiPeriodicCoefficient*> named[] = {
        {"r1", &sc.params.r1},   {"r2", &sc.params.r2},   {"s1", &sc.params.s1},
        {"s2", &sc.params.s2},   {"a11", &sc.params.a11}, {"a12", &sc.params.a12},
        {"a21", &sc.params.a21}, {"a22", &sc.params.a22}, {"b11", &sc.params.b11},
        {"b12", &sc.params.b12}, {"b21", &sc.params.b21}, {"b22", &sc.params.b22},
        {"D1", &sc.params.D1},   {"D2", &sc.params.D2},
    };
    for (const auto& [name, coeff] : named) {
        if (!jp.contains(name)) throw ConfigError(std::string("params: missing '") + name + "'");
        *coeff = detail::parse_coefficient(jp.at(name), std::string("params.") + name);
    }

    if (!j.contains("initial_states") || !j.at("initial_states").is_array() ||
        j.at("initial_states").empty())
        throw ConfigError("config: 'initial_states' must be a non-empty array");
    std::size_t i = 0;
    for (const nlohmann::json& js : j.at("initial_states"))
        sc.initial_states.push_back(
            detail::parse_state(js, "initial_states[" + std::to_string(i++) + "]"));

    if (j.contains("integration")) {
        const nlohmann::json& ji = j.at("integration");
        const std::string where = "integration";
        if (ji.contains("method")) {
            const std::string m = ji.at("method").get<std::string>();
            if (m == "rk4") {
                sc.integration.method = StepMethod::rk4;
            } else if (m == "rkf45") {
                sc.integration.method = StepMethod::rkf45;
            } else {
                throw ConfigError("integration: method must be \"rk4\" or \"rkf45\"");
            }
        }
        sc.integration.h_init = optional_number(ji, "h_init", sc.integration.h_init, where);
        sc.integration.h_min = optional_number(ji, "h_min", sc.integration.h_min, where);
        sc.integration.rel_tol = optional_number(ji, "rel_tol", sc.integration.rel_tol, where);
        if (ji.contains("record_stride")) {
            if (!ji.at("record_stride").is_number_unsigned())
                throw ConfigError("integration: record_stride must be a nonnegative integer");
            sc.integration.record_stride = ji.at("record_stride").get<std::size_t>();
        }
    }

    if (j.contains("simulate"))
        sc.simulate.t_end =
            optional_number(j.at("simulate"), "t_end", sc.simulate.t_end, "simulate");

    if (j.contains("region")) {
        const nlohmann::json& jr = j.at("region");
        if (jr.contains("seed")) {
            if (!jr.at("seed").is_number_unsigned())
                throw ConfigError("region: seed must be a nonnegative integer");
            sc.region.seed = jr.at("seed").get<std::uint64_t>();
        }
        if (jr.contains("ensemble_size")) {
            if (!jr.at("ensemble_size").is_number_unsigned())
                throw ConfigError("region: ensemble_size must be a nonnegative integer");
            sc.region.ensemble_size = jr.at("ensemble_size").get<std::size_t>();
        }
        sc.region.ic_box.lo = optional_number(jr, "ic_lo", sc.region.ic_box.lo, "region");
        sc.region.ic_box.hi = optional_number(jr, "ic_hi", sc.region.ic_box.hi, "region");
        sc.region.burn_in = optional_number(jr, "burn_in", sc.region.burn_in, "region");
        sc.region.horizon = optional_number(jr, "horizon", sc.region.horizon, "region");
        sc.region.margin = optional_number(jr, "margin", sc.region.margin, "region");
    }

    if (j.contains("decay")) {
        const nlohmann::json& jd = j.at("decay");
        if (jd.contains("shadow")) sc.decay.shadow = detail::parse_state(jd.at("shadow"), "decay.shadow");
        sc.decay.t_start = optional_number(jd, "t_start", sc.decay.t_start, "decay");
        sc.decay.t_end = optional_number(jd, "t_end", sc.decay.t_end, "decay");
        sc.decay.tol = optional_number(jd, "tol", sc.decay.tol, "decay");
    }

    if (j.contains("attract")) {
        sc.attract.t_end = optional_number(j.at("attract"), "t_end", sc.attract.t_end, "attract");
        sc.attract.eps = optional_number(j.at("attract"), "eps", sc.attract.eps, "attract");
    }

    if (j.contains("scan")) {
        const nlohmann::json& js = j.at("scan");
        sc.scan.window_start = optional_number(js, "window_start", sc.scan.window_start, "scan");
        sc.scan.window_end = optional_number(js, "window_end", sc.scan.window_end, "scan");
        sc.scan.shift_min = optional_number(js, "shift_min", sc.scan.shift_min, "scan");
        sc.scan.shift_max = optional_number(js, "shift_max", sc.scan.shift_max, "scan");
        sc.scan.shift_step = optional_number(js, "shift_step", sc.scan.shift_step, "scan");
        sc.scan.epsilon = optional_number(js, "epsilon", sc.scan.epsilon, "scan");
    }

    if (j.contains("output_dir")) {
        if (!j.at("output_dir").is_string())
            throw ConfigError("config: 'output_dir' must be a string");
        sc.output_dir = j.at("output_dir").get<std::string>();
    }
    return sc;
}

inline nlohmann::json scenario_to_json(const Scenario& sc) {
    nlohmann::json j;
    nlohmann::json& jp = j["params"];
    const std::pair<const char*, const QuasiPeriodicCoefficient*> named[] = {
        {"r1", &sc.params.r1},   {"r2", &sc.params.r2},   {"s1", &sc.params.s1},
        {"s2", &sc.params.s2},   {"a11", &sc.params.a11}, {"a12", &sc.params.a12},
        {"a21", &sc.params.a21}, {"a22", &sc.params.a22}, {"b11", &sc.params.b11},
        {"b12", &sc.params.b12}, {"b21", &sc.params.b21}, {"b22", &sc.params.b22},
        {"D1", &sc.params.D1},   {"D2", &sc.params.D2},
    };
    for (const auto& [name, coeff] : named) jp[name] = detail::coefficient_to_json(*coeff);

    j["initial_states"] = nlohmann::json::array();
    for (const State& z : sc.initial_states) j["initial_states"].push_back(detail::state_to_json(z));

    j["integration"] = {
        {"method", sc.integration.method == StepMethod::rk4 ? "rk4" : "rkf45"},
        {"h_init", sc.integration.h_init},
        {"h_min", sc.integration.h_min},
        {"rel_tol", sc.integration.rel_tol},
        {"record_stride", sc.integration.record_stride},
    };
    j["simulate"] = {{"t_end", sc.simulate.t_end}};
    j["region"] = {
        {"seed", sc.region.seed},     {"ensemble_size", sc.region.ensemble_size},
        {"ic_lo", sc.region.ic_box.lo}, {"ic_hi", sc.region.ic_box.hi},
        {"burn_in", sc.region.burn_in}, {"horizon", sc.region.horizon},
        {"margin", sc.region.margin},
    };
    j["decay"] = {
        {"shadow", detail::state_to_json(sc.decay.shadow)},
        {"t_start", sc.decay.t_start},
        {"t_end", sc.decay.t_end},
        {"tol", sc.decay.tol},
    };
    j["attract"] = {{"t_end", sc.attract.t_end}, {"eps", sc.attract.eps}};
    j["scan"] = {
        {"window_start", sc.scan.window_start}, {"window_end", sc.scan.window_end},
        {"shift_min", sc.scan.shift_min},       {"shift_max", sc.scan.shift_max},
        {"shift_step", sc.scan.shift_step},     {"epsilon", sc.scan.epsilon},
    };
    j["output_dir"] = sc.output_dir;
    return j;
}

inline Scenario load_scenario(const std::string& path) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(read_text_file(path));
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return scenario_from_json(j);
}

inline void save_scenario(const std::string& path, const Scenario& sc) {
    write_text_file(path, scenario_to_json(sc).dump(2) + "\n");
}

}  // namespace patchlv
