// Scenario and sweep-specification files: JSON with a strict schema.
// Unknown fields are rejected with their JSON path; syntax errors are
// reported with the line they occur on.
#pragma once

#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "pdmosc/core.hpp"
#include "pdmosc/dynamics.hpp"
#include "pdmosc/integrate.hpp"
#include "pdmosc/sweep.hpp"

namespace pdmosc::scenario {

using json = nlohmann::json;

struct ConfigError : Error {
    using Error::Error;
};

namespace detail {

inline std::size_t line_of_byte(const std::string& text, std::size_t byte) {
    std::size_t line = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i)
        if (text[i] == '\n') ++line;
    return line;
}

// Tracks which keys were consumed; anything left over is a schema violation.
class StrictObject {
  public:
    StrictObject(const json& j, std::string path)
        : j_(j), path_(std::move(path)) {
        if (!j.is_object())
            throw ConfigError(path_ + ": expected an object");
    }

    bool has(const std::string& key) {
        if (j_.contains(key)) {
            seen_.insert(key);
            return true;
        }
        return false;
    }

    const json& at(const std::string& key) {
        if (!has(key))
            throw ConfigError(path_ + ": missing required field '" + key + "'");
        return j_.at(key);
    }

    const json* find(const std::string& key) {
        return has(key) ? &j_.at(key) : nullptr;
    }

    double number(const std::string& key) {
        const json& v = at(key);
        if (!v.is_number())
            throw ConfigError(path_ + "." + key + ": expected a number");
        return v.get<double>();
    }

    double number_or(const std::string& key, double fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number())
            throw ConfigError(path_ + "." + key + ": expected a number");
        return v->get<double>();
    }

    long integer_or(const std::string& key, long fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_number_integer())
            throw ConfigError(path_ + "." + key + ": expected an integer");
        return v->get<long>();
    }

    std::string string(const std::string& key) {
        const json& v = at(key);
        if (!v.is_string())
            throw ConfigError(path_ + "." + key + ": expected a string");
        return v.get<std::string>();
    }

    std::string string_or(const std::string& key, std::string fallback) {
        const json* v = find(key);
        if (!v) return fallback;
        if (!v->is_string())
            throw ConfigError(path_ + "." + key + ": expected a string");
        return v->get<std::string>();
    }

    Vec vector(const std::string& key) {
        const json& v = at(key);
        return parse_vec(v, path_ + "." + key);
    }

    static Vec parse_vec(const json& v, const std::string& path) {
        if (!v.is_array())
            throw ConfigError(path + ": expected an array of numbers");
        Vec out;
        for (const auto& c : v) {
            if (!c.is_number())
                throw ConfigError(path + ": expected an array of numbers");
            out.push_back(c.get<double>());
        }
        return out;
    }

    const json& raw() const { return j_; }
    const std::string& path() const { return path_; }

    void finish() {
        for (const auto& [key, value] : j_.items()) {
            (void)value;
            if (!seen_.count(key))
                throw ConfigError(path_ + ": unknown field '" + key + "'");
        }
    }

  private:
    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

inline SignBranch parse_sign(const std::string& s, const std::string& path) {
    if (s == "PLUS") return SignBranch::Plus;
    if (s == "MINUS") return SignBranch::Minus;
    throw ConfigError(path + ": sign must be PLUS or MINUS, got '" + s + "'");
}

inline Family parse_family(const std::string& s, const std::string& path) {
    if (s == "TYPE_A") return Family::TypeA;
    if (s == "TYPE_B") return Family::TypeB;
    if (s == "TYPE_C") return Family::TypeC;
    throw ConfigError(path + ": family must be TYPE_A, TYPE_B or TYPE_C");
}

inline ProfileKind parse_kind(const std::string& s, const std::string& path) {
    if (s == "MATHEWS_LAKSHMANAN") return ProfileKind::MathewsLakshmanan;
    if (s == "POWER_LAW") return ProfileKind::PowerLaw;
    if (s == "SHIFTED_ML") return ProfileKind::ShiftedMl;
    throw ConfigError(path +
                      ": kind must be MATHEWS_LAKSHMANAN, POWER_LAW or "
                      "SHIFTED_ML");
}

inline dynamics::EomForm parse_form(const std::string& s,
                                    const std::string& path) {
    if (s == "EL1") return dynamics::EomForm::El1;
    if (s == "EL2_DIRECT") return dynamics::EomForm::El2Direct;
    if (s == "EL2_MDOT") return dynamics::EomForm::El2Mdot;
    if (s == "EL2_RADIAL") return dynamics::EomForm::El2Radial;
    if (s == "NEWTON_FULL") return dynamics::EomForm::NewtonFull;
    if (s == "NEWTON_PARALLEL") return dynamics::EomForm::NewtonParallel;
    throw ConfigError(path + ": unknown equation form '" + s + "'");
}

inline ode::Method parse_method(const std::string& s, const std::string& path) {
    if (s == "RK4_FIXED") return ode::Method::Rk4Fixed;
    if (s == "RK45_ADAPTIVE") return ode::Method::Rk45Adaptive;
    throw ConfigError(path + ": method must be RK4_FIXED or RK45_ADAPTIVE");
}

inline PdmProfile parse_profile(const json& j, const std::string& path) {
    StrictObject o(j, path);
    const auto kind = parse_kind(o.string("kind"), path + ".kind");
    PdmProfile p;
    switch (kind) {
        case ProfileKind::MathewsLakshmanan:
            p = mathews_lakshmanan(o.number("lambda"),
                                   parse_sign(o.string("sign"), path + ".sign"));
            break;
        case ProfileKind::PowerLaw:
            p = power_law(o.number("k"), o.number("upsilon"));
            break;
        case ProfileKind::ShiftedMl:
            p = shifted_ml(o.number("lambda"),
                           parse_sign(o.string("sign"), path + ".sign"),
                           o.vector("shift"));
            break;
    }
    o.finish();
    return p;
}

inline OscillatorModel parse_model(const json& j, const std::string& path) {
    StrictObject o(j, path);
    OscillatorModel m;
    m.family = parse_family(o.string("family"), path + ".family");
    m.profile = parse_profile(o.at("profile"), path + ".profile");
    m.dim = static_cast<std::size_t>(o.integer_or("dim", 0));
    m.omega0 = o.number("omega0");
    m.m0 = o.number_or("m0", 1.0);
    if (o.has("zeta")) m.zeta = StrictObject::parse_vec(o.raw().at("zeta"), path + ".zeta");
    if (const json* z = o.find("zeta_sq")) {
        if (!z->is_number())
            throw ConfigError(path + ".zeta_sq: expected a number");
        m.zeta_sq_formal = z->get<double>();
    }
    o.finish();
    if (m.dim == 0) {
        // infer from the vectors present
        if (!m.zeta.empty())
            m.dim = m.zeta.size();
        else if (m.profile.kind == ProfileKind::ShiftedMl)
            m.dim = m.profile.shift.size();
        else
            throw ConfigError(path + ": dim is required for this model");
    }
    try {
        validate(m);
    } catch (const ConstraintError& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return m;
}

inline ode::IntegratorConfig parse_integrator(const json& j,
                                              const std::string& path) {
    StrictObject o(j, path);
    ode::IntegratorConfig cfg;
    cfg.method = parse_method(o.string("method"), path + ".method");
    cfg.dt = o.number_or("dt", cfg.method == ode::Method::Rk4Fixed ? -1.0 : 0.0);
    if (cfg.method == ode::Method::Rk4Fixed && cfg.dt <= 0.0)
        throw ConfigError(path + ": dt > 0 is required for RK4_FIXED");
    cfg.abs_tol = o.number_or("abs_tol", 1e-12);
    cfg.rel_tol = o.number_or("rel_tol", 1e-10);
    if (cfg.abs_tol <= 0.0 || cfg.rel_tol <= 0.0)
        throw ConfigError(path + ": tolerances must be positive");
    cfg.t_end = o.number("t_end");
    cfg.max_steps = o.integer_or("max_steps", 2000000);
    cfg.record_every = static_cast<int>(o.integer_or("record_every", 1));
    if (cfg.record_every < 1)
        throw ConfigError(path + ": record_every must be >= 1");
    o.finish();
    return cfg;
}

}  // namespace detail

/// Per-trajectory verifications a scenario may request by name.
inline const std::set<std::string>& scenario_check_names() {
    static const std::set<std::string> names = {
        "energy_drift", "tau_monotone", "closed_form_match", "linearization"};
    return names;
}

struct Scenario {
    OscillatorModel model;
    dynamics::EomForm form = dynamics::EomForm::El2Direct;
    bool from_closed_form = false;
    Vec init_x, init_v;   // explicit initial state
    Vec amplitudes;       // closed-form initial state
    double phase = 0.0;
    ode::IntegratorConfig integrator;
    std::vector<std::string> checks;
    std::string trajectory_csv = "trajectory.csv";
    std::string reference_csv = "reference.csv";
    std::string summary_json = "summary.json";
};

inline json parse_json_text(const std::string& text,
                            const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError(origin + ": line " +
                          std::to_string(detail::line_of_byte(text, e.byte)) +
                          ": " + e.what());
    }
}

inline json load_json_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError(path + ": cannot open file");
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_json_text(buf.str(), path);
}

inline Scenario parse_scenario(const json& j, const std::string& origin) {
    detail::StrictObject o(j, origin);
    Scenario s;
    s.model = detail::parse_model(o.at("model"), origin + ".model");
    s.form = detail::parse_form(o.string_or("eom_form", "EL2_DIRECT"),
                                origin + ".eom_form");
    {
        detail::StrictObject init(o.at("initial"), origin + ".initial");
        if (init.has("from_closed_form")) {
            detail::StrictObject cf(init.raw().at("from_closed_form"),
                                    origin + ".initial.from_closed_form");
            s.from_closed_form = true;
            s.amplitudes = cf.vector("amplitudes");
            s.phase = cf.number_or("phase", 0.0);
            cf.finish();
        } else {
            s.init_x = init.vector("x");
            s.init_v = init.vector("v");
            if (s.init_x.size() != s.model.dim || s.init_v.size() != s.model.dim)
                throw ConfigError(origin +
                                  ".initial: x and v must have length dim");
        }
        init.finish();
    }
    s.integrator = detail::parse_integrator(o.at("integrator"),
                                            origin + ".integrator");
    if (const json* c = o.find("checks")) {
        if (!c->is_array())
            throw ConfigError(origin + ".checks: expected an array of names");
        for (const auto& name : *c) {
            if (!name.is_string() ||
                !scenario_check_names().count(name.get<std::string>()))
                throw ConfigError(origin +
                                  ".checks: unknown check name " + name.dump());
            s.checks.push_back(name.get<std::string>());
        }
    }
    if (o.has("output")) {
        detail::StrictObject out(o.raw().at("output"), origin + ".output");
        s.trajectory_csv = out.string_or("trajectory_csv", s.trajectory_csv);
        s.reference_csv = out.string_or("reference_csv", s.reference_csv);
        s.summary_json = out.string_or("summary_json", s.summary_json);
        out.finish();
    }
    o.finish();
    if (s.from_closed_form && s.amplitudes.size() != s.model.dim)
        throw ConfigError(origin +
                          ".initial.from_closed_form: amplitudes must have "
                          "length dim");
    return s;
}

inline Scenario load_scenario(const std::string& path) {
    return parse_scenario(load_json_file(path), path);
}

inline sweep::SweepSpec parse_sweep_spec(const json& j,
                                         const std::string& origin) {
    detail::StrictObject o(j, origin);
    sweep::SweepSpec spec;
    spec.family = detail::parse_family(o.string_or("family", "TYPE_A"),
                                       origin + ".family");
    spec.kind = detail::parse_kind(o.string("profile_kind"),
                                   origin + ".profile_kind");
    spec.sign = detail::parse_sign(o.string_or("sign", "PLUS"),
                                   origin + ".sign");
    detail::StrictObject grid(o.at("grid"), origin + ".grid");
    if (grid.has("lambda"))
        spec.lambda = detail::StrictObject::parse_vec(grid.raw().at("lambda"),
                                                      origin + ".grid.lambda");
    if (grid.has("k"))
        spec.k = detail::StrictObject::parse_vec(grid.raw().at("k"),
                                                 origin + ".grid.k");
    if (grid.has("upsilon"))
        spec.upsilon = detail::StrictObject::parse_vec(
            grid.raw().at("upsilon"), origin + ".grid.upsilon");
    if (grid.has("omega0"))
        spec.omega0 = detail::StrictObject::parse_vec(grid.raw().at("omega0"),
                                                      origin + ".grid.omega0");
    else
        spec.omega0 = {1.0};
    {
        const json& amps = grid.at("amplitudes");
        if (!amps.is_array() || amps.empty())
            throw ConfigError(origin +
                              ".grid.amplitudes: expected a non-empty array "
                              "of amplitude vectors");
        for (const auto& a : amps)
            spec.amplitudes.push_back(detail::StrictObject::parse_vec(
                a, origin + ".grid.amplitudes"));
    }
    grid.finish();
    if (o.has("shift"))
        spec.shift = detail::StrictObject::parse_vec(o.raw().at("shift"),
                                                     origin + ".shift");
    spec.phase = o.number_or("phase", 0.0);
    spec.periods = o.number_or("periods", 10.0);
    if (o.has("integrator")) {
        detail::StrictObject icfg(o.raw().at("integrator"),
                                  origin + ".integrator");
        spec.method = detail::parse_method(
            icfg.string_or("method", "RK45_ADAPTIVE"),
            origin + ".integrator.method");
        spec.rel_tol = icfg.number_or("rel_tol", spec.rel_tol);
        spec.abs_tol = icfg.number_or("abs_tol", spec.abs_tol);
        spec.max_steps = icfg.integer_or("max_steps", spec.max_steps);
        spec.record_every =
            static_cast<int>(icfg.integer_or("record_every", 1));
        icfg.finish();
    }
    spec.jobs = static_cast<int>(o.integer_or("jobs", 1));
    o.finish();

    const bool is_power = spec.kind == ProfileKind::PowerLaw;
    if (is_power && (spec.k.empty() || spec.upsilon.empty()))
        throw ConfigError(origin +
                          ".grid: power-law sweeps need k and upsilon grids");
    if (!is_power && spec.lambda.empty())
        throw ConfigError(origin + ".grid: lambda grid is required");
    if (spec.kind == ProfileKind::ShiftedMl && spec.shift.empty())
        throw ConfigError(origin + ": shifted sweeps need a shift vector");
    return spec;
}

inline sweep::SweepSpec load_sweep_spec(const std::string& path) {
    return parse_sweep_spec(load_json_file(path), path);
}

inline json report_to_json(const VerificationReport& r) {
    return json{{"check", r.check_name},
                {"max_residual", r.max_residual},
                {"rms_residual", r.rms_residual},
                {"tolerance", r.tolerance},
                {"passed", r.passed},
                {"notes", r.notes}};
}

inline json reports_to_json(const std::vector<VerificationReport>& reports) {
    json arr = json::array();
    for (const auto& r : reports) arr.push_back(report_to_json(r));
    return arr;
}

}  // namespace pdmosc::scenario
