// Implementations of the CLI subcommands. Kept out of main() so tests can
// drive them directly.
//
// Exit codes: 0 success, 2 domain exit, 3 configuration error, 4 validity
// gate failure.
#pragma once

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "pdmosc/checks.hpp"
#include "pdmosc/closed_form.hpp"
#include "pdmosc/csv.hpp"
#include "pdmosc/scenario.hpp"
#include "pdmosc/sweep.hpp"
#include "pdmosc/transforms.hpp"

namespace pdmosc::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitDomainExit = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitValidity = 4;

namespace detail {

using scenario::json;

inline PhaseState initial_state(const scenario::Scenario& s) {
    if (!s.from_closed_form) return PhaseState{0.0, s.init_x, s.init_v};
    const auto orbit =
        closed_form::build_orbit(s.model, s.amplitudes, s.phase);
    return closed_form::evaluate_orbit(orbit, 0.0);
}

inline void write_text_file(const std::filesystem::path& path,
                            const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error("cannot write " + path.string());
    out << text;
}

inline std::vector<VerificationReport> run_scenario_checks(
    const scenario::Scenario& s, const Trajectory& traj) {
    std::vector<VerificationReport> reports;
    for (const auto& name : s.checks) {
        try {
            if (name == "energy_drift") {
                const double e0 = traj.samples.front().energy;
                double drift = 0.0;
                for (const auto& smp : traj.samples)
                    drift = std::max(drift, std::abs(smp.energy - e0) /
                                                std::max(1e-300, std::abs(e0)));
                reports.push_back(make_report("energy_drift", drift, drift,
                                              1e-8,
                                              "relative total-energy drift"));
            } else if (name == "tau_monotone") {
                double violations = 0.0;
                for (std::size_t i = 1; i < traj.samples.size(); ++i)
                    if (!(traj.samples[i].tau > traj.samples[i - 1].tau))
                        violations += 1.0;
                reports.push_back(make_report(
                    "tau_monotone", violations, violations, 0.0,
                    "number of non-increasing re-scaled-time steps"));
            } else if (name == "closed_form_match") {
                if (!s.from_closed_form)
                    throw ValidityError(
                        "closed_form_match needs from_closed_form initial "
                        "conditions");
                const auto orbit = closed_form::build_orbit(
                    s.model, s.amplitudes, s.phase);
                double worst = 0.0;
                for (const auto& smp : traj.samples) {
                    const auto ref =
                        closed_form::evaluate_orbit(orbit, smp.state.t);
                    for (std::size_t i = 0; i < ref.x.size(); ++i)
                        worst = std::max(worst,
                                         std::abs(ref.x[i] - smp.state.x[i]));
                }
                reports.push_back(make_report(
                    "closed_form_match", worst, worst, 1e-6,
                    "max per-component deviation from the analytic orbit"));
            } else if (name == "linearization") {
                const auto ref = transforms::to_reference(s.model, traj);
                const auto fit = transforms::cosine_fit(ref);
                const double dev =
                    std::abs(fit.omega - s.model.omega0) / s.model.omega0;
                const auto sho =
                    transforms::sho_residual(ref, s.model.omega0, 1e-4);
                std::ostringstream notes;
                notes << "fitted omega = " << fit.omega
                      << " vs omega0 = " << s.model.omega0
                      << "; reference-equation residual rms = "
                      << sho.rms_residual;
                reports.push_back(
                    make_report("linearization", dev, dev, 1e-6, notes.str()));
            }
        } catch (const std::exception& e) {
            reports.push_back(make_report(name, 1.0, 1.0, 0.0,
                                          std::string("check failed: ") +
                                              e.what()));
        }
    }
    return reports;
}

inline json summary_base(const scenario::Scenario& s, const Trajectory& traj,
                         const std::string& status,
                         const std::string& message) {
    json j;
    j["status"] = status;
    if (!message.empty()) j["message"] = message;
    j["dim"] = s.model.dim;
    j["samples"] = traj.samples.size();
    if (!traj.samples.empty()) {
        j["t_final"] = traj.samples.back().state.t;
        j["energy_initial"] = traj.samples.front().energy;
        j["energy_final"] = traj.samples.back().energy;
    }
    return j;
}

}  // namespace detail

inline int cmd_simulate(const std::string& scenario_path,
                        const std::string& out_dir,
                        std::ostream& err = std::cerr) {
    namespace fs = std::filesystem;
    scenario::Scenario s;
    PhaseState init;
    try {
        s = scenario::load_scenario(scenario_path);
        init = detail::initial_state(s);
    } catch (const scenario::ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ConstraintError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    fs::create_directories(out_dir);

    Trajectory traj{s.model, {}};
    std::string status = "ok";
    std::string message;
    int code = kExitOk;
    try {
        traj = ode::integrate(s.model, s.form, init, s.integrator);
    } catch (const ode::DomainExitError& e) {
        traj = e.partial;
        status = "domain_exit";
        message = e.what();
        code = kExitDomainExit;
    } catch (const CollinearityError& e) {
        err << "validity error: " << e.what() << '\n';
        status = "validity_error";
        message = e.what();
        code = kExitValidity;
    } catch (const Error& e) {
        err << "integration failed: " << e.what() << '\n';
        status = "error";
        message = e.what();
        code = kExitFailure;
    }

    {
        std::ostringstream csv;
        io::write_trajectory_csv(csv, traj);
        detail::write_text_file(fs::path(out_dir) / s.trajectory_csv,
                                csv.str());
    }
    auto summary = detail::summary_base(s, traj, status, message);
    if (code == kExitOk || code == kExitDomainExit) {
        const auto reports = detail::run_scenario_checks(s, traj);
        if (!reports.empty()) summary["checks"] = scenario::reports_to_json(reports);
    }
    summary["exit_code"] = code;
    detail::write_text_file(fs::path(out_dir) / s.summary_json,
                            summary.dump(2) + "\n");
    if (code == kExitDomainExit)
        err << "domain exit: " << message << '\n';
    return code;
}

inline int cmd_linearize(const std::string& scenario_path,
                         const std::string& out_dir,
                         std::ostream& err = std::cerr) {
    namespace fs = std::filesystem;
    scenario::Scenario s;
    PhaseState init;
    try {
        s = scenario::load_scenario(scenario_path);
        init = detail::initial_state(s);
    } catch (const scenario::ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const ConstraintError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    fs::create_directories(out_dir);

    Trajectory traj{s.model, {}};
    std::string status = "ok";
    std::string message;
    int code = kExitOk;
    try {
        traj = ode::integrate(s.model, s.form, init, s.integrator);
    } catch (const ode::DomainExitError& e) {
        traj = e.partial;
        status = "domain_exit";
        message = e.what();
        code = kExitDomainExit;
    } catch (const CollinearityError& e) {
        err << "validity error: " << e.what() << '\n';
        return kExitValidity;
    }

    scenario::json summary = detail::summary_base(s, traj, status, message);
    {
        std::ostringstream csv;
        io::write_trajectory_csv(csv, traj);
        detail::write_text_file(fs::path(out_dir) / s.trajectory_csv,
                                csv.str());
    }
    try {
        const auto ref = transforms::to_reference(s.model, traj);
        {
            std::ostringstream csv;
            io::write_reference_csv(csv, ref);
            detail::write_text_file(fs::path(out_dir) / s.reference_csv,
                                    csv.str());
        }
        const auto fit = transforms::cosine_fit(ref);
        const auto sho = transforms::sho_residual(ref, s.model.omega0, 1e-4);
        summary["cosine_fit"] = {
            {"omega", fit.omega},
            {"omega0", s.model.omega0},
            {"relative_deviation",
             std::abs(fit.omega - s.model.omega0) / s.model.omega0},
            {"phase", fit.phase},
            {"amplitudes", fit.amplitudes},
            {"rms", fit.rms}};
        summary["sho_residual"] = scenario::report_to_json(sho);
    } catch (const ValidityError& e) {
        err << "validity error: " << e.what() << '\n';
        return kExitValidity;
    } catch (const Error& e) {
        err << "linearization failed: " << e.what() << '\n';
        summary["status"] = "error";
        summary["message"] = e.what();
        code = kExitFailure;
    }
    summary["exit_code"] = code;
    detail::write_text_file(fs::path(out_dir) / s.summary_json,
                            summary.dump(2) + "\n");
    return code;
}

inline int cmd_verify(const std::string& family_filter,
                      const std::map<std::string, double>& tol_overrides,
                      const std::string& out_dir,
                      std::ostream& out = std::cout,
                      std::ostream& err = std::cerr) {
    namespace fs = std::filesystem;
    std::vector<VerificationReport> reports;
    try {
        reports = checks::run_checks(family_filter, tol_overrides);
    } catch (const std::exception& e) {
        err << "verify failed: " << e.what() << '\n';
        return kExitFailure;
    }
    if (reports.empty()) {
        err << "config error: no checks match family filter '" << family_filter
            << "'\n";
        return kExitConfig;
    }
    bool all_passed = true;
    for (const auto& r : reports) {
        all_passed = all_passed && r.passed;
        out << (r.passed ? "[PASS] " : "[FAIL] ") << r.check_name
            << " (max " << io::format_double(r.max_residual) << ", tol "
            << io::format_double(r.tolerance) << ")\n";
    }
    if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        detail::write_text_file(
            fs::path(out_dir) / "verification_report.json",
            scenario::reports_to_json(reports).dump(2) + "\n");
    }
    return all_passed ? kExitOk : kExitFailure;
}

inline int cmd_sweep(const std::string& spec_path, const std::string& out_dir,
                     int jobs_override, std::ostream& err = std::cerr) {
    namespace fs = std::filesystem;
    sweep::SweepSpec spec;
    try {
        spec = scenario::load_sweep_spec(spec_path);
    } catch (const scenario::ConfigError& e) {
        err << "config error: " << e.what() << '\n';
        return kExitConfig;
    }
    if (jobs_override > 0) spec.jobs = jobs_override;
    const auto points = sweep::expand_grid(spec);
    if (points.empty()) {
        err << "config error: empty sweep grid\n";
        return kExitConfig;
    }
    const auto rows = sweep::run_sweep(spec);
    fs::create_directories(out_dir);
    {
        std::ostringstream csv;
        sweep::write_sweep_csv(csv, spec, rows);
        detail::write_text_file(fs::path(out_dir) / "sweep.csv", csv.str());
    }
    std::size_t ok = 0, domain_exits = 0, errors = 0;
    for (const auto& r : rows) {
        if (r.status == "ok") ++ok;
        else if (r.status == "domain_exit") ++domain_exits;
        else ++errors;
    }
    scenario::json summary{{"points", rows.size()},
                           {"ok", ok},
                           {"domain_exits", domain_exits},
                           {"errors", errors}};
    detail::write_text_file(fs::path(out_dir) / "sweep_summary.json",
                            summary.dump(2) + "\n");
    if (errors > 0) {
        err << errors << " grid points failed; see sweep.csv notes\n";
        return kExitFailure;
    }
    return kExitOk;
}

}  // namespace pdmosc::cli
