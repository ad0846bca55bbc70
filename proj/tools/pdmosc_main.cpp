// pdmosc: simulate, verify, linearize, and sweep position-dependent-mass
// nonlinear oscillators.
#include <CLI11.hpp>

#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "pdmosc/commands.hpp"

namespace {

int parse_tolerances(const std::vector<std::string>& pairs,
                     std::map<std::string, double>& out) {
    for (const auto& p : pairs) {
        const auto eq = p.find('=');
        if (eq == std::string::npos || eq == 0) {
            std::cerr << "config error: --tol expects NAME=VALUE, got '" << p
                      << "'\n";
            return pdmosc::cli::kExitConfig;
        }
        try {
            out[p.substr(0, eq)] = std::stod(p.substr(eq + 1));
        } catch (const std::exception&) {
            std::cerr << "config error: bad tolerance value in '" << p
                      << "'\n";
            return pdmosc::cli::kExitConfig;
        }
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{
        "Simulation and verification toolkit for n-dimensional "
        "position-dependent-mass nonlinear oscillators"};
    app.require_subcommand(1);

    std::string scenario_path;
    std::string out_dir = "out";
    std::string family;
    std::vector<std::string> tol_pairs;
    int jobs = 0;

    auto* simulate = app.add_subcommand(
        "simulate", "Integrate a scenario and export the trajectory CSV");
    simulate->add_option("--scenario", scenario_path, "Scenario JSON file")
        ->required();
    simulate->add_option("--out", out_dir, "Output directory");

    auto* verify = app.add_subcommand(
        "verify", "Run the registered verification suite");
    verify->add_option("--family", family,
                       "Restrict to one oscillator family "
                       "(ML1, PL1, ML2, PL2, SHIFTED_ML1)");
    verify->add_option("--tol", tol_pairs,
                       "Override a check tolerance as NAME=VALUE");
    verify->add_option("--out", out_dir,
                       "Directory for the JSON verification report");

    auto* linearize = app.add_subcommand(
        "linearize",
        "Map a trajectory to reference coordinates and fit the oscillation");
    linearize->add_option("--scenario", scenario_path, "Scenario JSON file")
        ->required();
    linearize->add_option("--out", out_dir, "Output directory");

    auto* sweep_cmd = app.add_subcommand(
        "sweep", "Run a parameter grid and tabulate frequencies and energies");
    sweep_cmd->add_option("--scenario", scenario_path,
                          "Sweep specification JSON file")
        ->required();
    sweep_cmd->add_option("--out", out_dir, "Output directory");
    sweep_cmd->add_option("--jobs", jobs, "Worker thread count");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : pdmosc::cli::kExitConfig;
    }

    if (simulate->parsed())
        return pdmosc::cli::cmd_simulate(scenario_path, out_dir);
    if (linearize->parsed())
        return pdmosc::cli::cmd_linearize(scenario_path, out_dir);
    if (sweep_cmd->parsed())
        return pdmosc::cli::cmd_sweep(scenario_path, out_dir, jobs);
    if (verify->parsed()) {
        std::map<std::string, double> tols;
        if (const int rc = parse_tolerances(tol_pairs, tols); rc != 0)
            return rc;
        return pdmosc::cli::cmd_verify(family, tols, out_dir);
    }
    return pdmosc::cli::kExitConfig;
}
