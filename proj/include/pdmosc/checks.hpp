// Registered verification suite: residual oracles for the five closed-form
// families, invariance checks, integration accuracy, linearization, frequency
// laws, convergence order, and the power-law type-II sign-regime finding.
// Each check pins its tolerance; the CLI may override by name.
//
// The per-family equation evaluators here are written out literally from the
// specialized equations of motion, independent of the generic common-mass
// machinery in dynamics.hpp, so each residual is certified by two routes.
#pragma once

#include <cctype>
#include <cmath>
#include <functional>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pdmosc/closed_form.hpp"
#include "pdmosc/core.hpp"
#include "pdmosc/csv.hpp"
#include "pdmosc/dynamics.hpp"
#include "pdmosc/integrate.hpp"
#include "pdmosc/sweep.hpp"
#include "pdmosc/transforms.hpp"

namespace pdmosc::checks {

struct Check {
    std::string name;    // stable identifier, e.g. "closed_form_residual.ml1"
    std::string family;  // ML1/PL1/ML2/PL2/SHIFTED_ML1, empty if cross-family
    int criterion = 0;   // acceptance criterion this check belongs to
    double default_tolerance = 0.0;
    std::function<VerificationReport(double tolerance)> run;
};

namespace detail {

// ---- literal per-family equations of motion (residual form) ----

// x_i'' -+ (lambda x_i/(1 +- lambda r^2)) sum v^2
//       + (1/(1 +- lambda r^2)) w0^2 x_i = 0
inline Vec ml1_equation(double lambda, double s, double w0,
                        const PhaseState& st, const Vec& acc) {
    const double r2 = dot(st.x, st.x);
    const double sumv2 = dot(st.v, st.v);
    const double denom = 1.0 + s * lambda * r2;
    Vec res(st.x.size());
    for (std::size_t i = 0; i < st.x.size(); ++i)
        res[i] = acc[i] - s * (lambda * st.x[i] / denom) * sumv2 +
                 (w0 * w0 / denom) * st.x[i];
    return res;
}

// x_i'' + upsilon x_i (sum v^2 / r^2) + (1 + upsilon) w0^2 x_i = 0
inline Vec pl1_equation(double ups, double w0, const PhaseState& st,
                        const Vec& acc) {
    const double r2 = dot(st.x, st.x);
    const double sumv2 = dot(st.v, st.v);
    Vec res(st.x.size());
    for (std::size_t i = 0; i < st.x.size(); ++i)
        res[i] = acc[i] + ups * st.x[i] * sumv2 / r2 +
                 (1.0 + ups) * w0 * w0 * st.x[i];
    return res;
}

// x_i'' -+ (lambda x_i/(1 +- lambda r^2)) sum v^2
//       + ((-+ lambda zeta^2)/(1 +- lambda r^2)) w0^2 x_i = 0
inline Vec ml2_equation(double lambda, double s, double zeta_sq, double w0,
                        const PhaseState& st, const Vec& acc) {
    const double r2 = dot(st.x, st.x);
    const double sumv2 = dot(st.v, st.v);
    const double denom = 1.0 + s * lambda * r2;
    Vec res(st.x.size());
    for (std::size_t i = 0; i < st.x.size(); ++i)
        res[i] = acc[i] - s * (lambda * st.x[i] / denom) * sumv2 -
                 s * (lambda * zeta_sq / denom) * w0 * w0 * st.x[i];
    return res;
}

// x_i'' + (upsilon/r^2)(sum v^2) x_i + (upsilon xi^2/r^2) w0^2 x_i = 0
inline Vec pl2_equation(double ups, double xi_sq, double w0,
                        const PhaseState& st, const Vec& acc) {
    const double r2 = dot(st.x, st.x);
    const double sumv2 = dot(st.v, st.v);
    Vec res(st.x.size());
    for (std::size_t i = 0; i < st.x.size(); ++i)
        res[i] = acc[i] + (ups / r2) * sumv2 * st.x[i] +
                 (ups * xi_sq / r2) * w0 * w0 * st.x[i];
    return res;
}

// x_i'' -+ [lambda y_i/(1 +- lambda y^2)] sum v^2
//       + (1/(1 +- lambda y^2)) w0^2 y_i = 0, y = x + shift
inline Vec shifted_ml1_equation(double lambda, double s, const Vec& shift,
                                double w0, const PhaseState& st,
                                const Vec& acc) {
    Vec y(st.x.size());
    for (std::size_t i = 0; i < st.x.size(); ++i) y[i] = st.x[i] + shift[i];
    const double y2 = dot(y, y);
    const double sumv2 = dot(st.v, st.v);
    const double denom = 1.0 + s * lambda * y2;
    Vec res(st.x.size());
    for (std::size_t i = 0; i < st.x.size(); ++i)
        res[i] = acc[i] - s * (lambda * y[i] / denom) * sumv2 +
                 (w0 * w0 / denom) * y[i];
    return res;
}

// ---- model builders ----

inline OscillatorModel ml1_model(double lambda, SignBranch sign,
                                 std::size_t dim, double w0) {
    OscillatorModel m;
    m.profile = mathews_lakshmanan(lambda, sign);
    m.family = Family::TypeA;
    m.dim = dim;
    m.omega0 = w0;
    return m;
}

inline OscillatorModel pl1_model(double k, double ups, std::size_t dim,
                                 double w0) {
    OscillatorModel m;
    m.profile = power_law(k, ups);
    m.family = Family::TypeA;
    m.dim = dim;
    m.omega0 = w0;
    return m;
}

inline OscillatorModel ml2_model(double lambda, SignBranch sign,
                                 const Vec& zeta_dir, double w0) {
    OscillatorModel m;
    m.profile = mathews_lakshmanan(lambda, sign);
    m.family = Family::TypeB;
    m.dim = zeta_dir.size();
    m.omega0 = w0;
    const double target = closed_form::ml2_required_zeta_sq(m.profile);
    if (target > 0.0) {
        const double n = norm(zeta_dir);
        m.zeta.assign(zeta_dir.size(), 0.0);
        for (std::size_t i = 0; i < zeta_dir.size(); ++i)
            m.zeta[i] = zeta_dir[i] / n * std::sqrt(target);
    } else {
        m.zeta_sq_formal = target;
    }
    return m;
}

inline OscillatorModel pl2_model(double k, std::size_t dim, double w0) {
    OscillatorModel m;
    m.profile = power_law(k, -1.0);
    m.family = Family::TypeB;
    m.dim = dim;
    m.omega0 = w0;
    m.zeta_sq_formal = -1.0 / k;
    return m;
}

inline OscillatorModel shifted_model(double lambda, SignBranch sign, Vec shift,
                                     double w0) {
    OscillatorModel m;
    m.dim = shift.size();
    m.profile = shifted_ml(lambda, sign, std::move(shift));
    m.family = Family::TypeC;
    m.omega0 = w0;
    return m;
}

/// The reference accuracy benchmark used by the integration, energy,
/// linearization, and convergence checks.
inline OscillatorModel benchmark_model() {
    return ml1_model(1.0, SignBranch::Plus, 3, 1.0);
}

inline closed_form::ClosedFormOrbit benchmark_orbit() {
    return closed_form::build_orbit(benchmark_model(), {1.0, 0.5, 0.25}, 0.0);
}

inline OscillatorModel benchmark_shifted_model() {
    return shifted_model(1.0, SignBranch::Plus, {0.4, -0.3, 0.2}, 1.0);
}

inline closed_form::ClosedFormOrbit benchmark_shifted_orbit() {
    return closed_form::build_orbit(benchmark_shifted_model(),
                                    {1.0, 0.5, 0.25}, 0.0);
}

struct ResidualStats {
    double max = 0.0;
    double sum_sq = 0.0;
    std::size_t count = 0;
    void add(const Vec& r) {
        for (double c : r) {
            const double a = std::abs(c);
            max = std::max(max, a);
            sum_sq += a * a;
            ++count;
        }
    }
    void add_value(double a) {
        a = std::abs(a);
        max = std::max(max, a);
        sum_sq += a * a;
        ++count;
    }
    double rms() const {
        return count ? std::sqrt(sum_sq / static_cast<double>(count)) : 0.0;
    }
};

// Closed-form residual oracle shared by the five family checks. omega_scale
// is a test hook: scaling the analytic frequency away from 1 must break the
// residual, proving the check's sensitivity.
using LiteralEquation =
    std::function<Vec(const OscillatorModel&, const PhaseState&, const Vec&)>;

inline VerificationReport closed_form_residual_report(
    const std::string& name, const std::vector<closed_form::ClosedFormOrbit>& orbits,
    const LiteralEquation& literal, double tolerance, double omega_scale,
    std::size_t samples_per_orbit) {
    ResidualStats stats;
    std::size_t used_orbits = 0;
    for (auto orbit : orbits) {
        orbit.Omega *= omega_scale;
        ++used_orbits;
        const bool principal_arc =
            orbit.family == closed_form::OrbitFamily::Pl1;
        const bool skip_origin =
            orbit.family == closed_form::OrbitFamily::Pl2 ||
            orbit.family == closed_form::OrbitFamily::Pl1;
        for (std::size_t k = 0; k < samples_per_orbit; ++k) {
            const double frac =
                static_cast<double>(k) / static_cast<double>(samples_per_orbit - 1);
            const double theta = principal_arc ? -1.45 + 2.9 * frac
                                               : 2.0 * M_PI * frac;
            if (skip_origin && std::abs(std::cos(theta)) < 0.05) continue;
            const double t = (theta - orbit.phase) / orbit.Omega;
            const auto st = closed_form::evaluate_orbit(orbit, t);
            const Vec acc = closed_form::evaluate_orbit_acceleration(orbit, t);
            stats.add(literal(orbit.model, st, acc));
            stats.add(dynamics::el_residual(
                orbit.model, dynamics::EomForm::El2Radial, st, acc));
        }
    }
    std::ostringstream notes;
    notes << used_orbits << " parameter combinations, " << samples_per_orbit
          << " time samples each; residuals from both the literal family "
             "equation and the generic reduced radial form";
    return make_report(name, stats.max, stats.rms(), tolerance, notes.str());
}

inline std::vector<closed_form::ClosedFormOrbit> ml1_grid() {
    std::vector<closed_form::ClosedFormOrbit> orbits;
    for (double w0 : {0.5, 1.0, 2.0})
        for (const Vec& amps : {Vec{1.0}, Vec{0.8, 0.3}, Vec{0.5, 0.4, 0.2}}) {
            for (double lam : {0.25, 1.0, 4.0})
                orbits.push_back(closed_form::build_orbit(
                    ml1_model(lam, SignBranch::Plus, amps.size(), w0), amps,
                    0.3));
            for (double lam : {0.1, 0.2, 0.5})
                orbits.push_back(closed_form::build_orbit(
                    ml1_model(lam, SignBranch::Minus, amps.size(), w0), amps,
                    0.3));
        }
    return orbits;
}

inline std::vector<closed_form::ClosedFormOrbit> pl1_grid() {
    std::vector<closed_form::ClosedFormOrbit> orbits;
    for (double w0 : {0.5, 1.0, 2.0})
        for (double k : {0.5, 1.0, 2.0})
            for (double ups : {0.5, 1.0, 2.0})
                orbits.push_back(closed_form::build_orbit(
                    pl1_model(k, ups, 2, w0), {0.9, 0.4}, 0.0));
    return orbits;
}

inline std::vector<closed_form::ClosedFormOrbit> ml2_grid() {
    std::vector<closed_form::ClosedFormOrbit> orbits;
    const Vec dir{2.0, 1.0, -1.0};
    for (double w0 : {0.5, 1.0, 2.0})
        for (double lam : {0.5, 1.0, 4.0})
            for (double scale : {0.2, 0.3, 0.4}) {
                Vec amps(3);
                for (std::size_t i = 0; i < 3; ++i)
                    amps[i] = scale * dir[i] / norm(dir);
                orbits.push_back(closed_form::build_orbit(
                    ml2_model(lam, SignBranch::Minus, dir, w0), amps, 0.3));
            }
    return orbits;
}

inline std::vector<closed_form::ClosedFormOrbit> pl2_grid() {
    std::vector<closed_form::ClosedFormOrbit> orbits;
    for (double w0 : {0.5, 1.0, 2.0})
        for (double k : {0.5, 1.0, 2.0})
            for (const Vec& amps : {Vec{1.0}, Vec{0.8, 0.3}, Vec{0.5, 0.5}})
                orbits.push_back(closed_form::build_orbit(
                    pl2_model(k, amps.size(), w0), amps, 0.3));
    return orbits;
}

inline std::vector<closed_form::ClosedFormOrbit> shifted_grid() {
    std::vector<closed_form::ClosedFormOrbit> orbits;
    for (double w0 : {0.5, 1.0, 2.0})
        for (const Vec& shift : {Vec{0.4, -0.2}, Vec{0.1, 0.3}, Vec{-0.5, 0.2}}) {
            for (double lam : {0.25, 1.0, 4.0})
                orbits.push_back(closed_form::build_orbit(
                    shifted_model(lam, SignBranch::Plus, shift, w0),
                    {0.5, 0.3}, 0.3));
            for (double lam : {0.1, 0.2, 0.5})
                orbits.push_back(closed_form::build_orbit(
                    shifted_model(lam, SignBranch::Minus, shift, w0),
                    {0.5, 0.3}, 0.3));
        }
    return orbits;
}

inline Trajectory benchmark_trajectory(ode::Method method, double periods) {
    const auto model = benchmark_model();
    const auto orbit = benchmark_orbit();
    const double T = 2.0 * M_PI / orbit.Omega;
    ode::IntegratorConfig cfg;
    cfg.method = method;
    cfg.dt = method == ode::Method::Rk4Fixed ? T / 2000.0 : T / 500.0;
    cfg.rel_tol = 1e-10;
    cfg.abs_tol = 1e-12;
    cfg.t_end = periods * T;
    return ode::integrate(model, dynamics::EomForm::El2Direct,
                          closed_form::evaluate_orbit(orbit, 0.0), cfg);
}

inline double max_position_error(const Trajectory& traj,
                                 const closed_form::ClosedFormOrbit& orbit) {
    double worst = 0.0;
    for (const auto& s : traj.samples) {
        const auto ref = closed_form::evaluate_orbit(orbit, s.state.t);
        for (std::size_t i = 0; i < ref.x.size(); ++i)
            worst = std::max(worst, std::abs(ref.x[i] - s.state.x[i]));
    }
    return worst;
}

inline Vec random_unit(std::mt19937_64& rng, std::size_t n) {
    std::normal_distribution<double> gauss(0.0, 1.0);
    Vec u(n);
    double nn = 0.0;
    do {
        for (auto& c : u) c = gauss(rng);
        nn = norm(u);
    } while (nn < 1e-6);
    for (auto& c : u) c /= nn;
    return u;
}

inline std::vector<OscillatorModel> invariance_models() {
    std::vector<OscillatorModel> models = {
        ml1_model(1.0, SignBranch::Plus, 3, 1.0),
        ml1_model(0.25, SignBranch::Minus, 3, 1.3),
        pl1_model(1.0, 1.0, 3, 1.0),
        pl1_model(0.5, 2.0, 3, 0.7),
        shifted_model(0.5, SignBranch::Plus, {0.3, -0.2, 0.1}, 1.0),
    };
    return models;
}

// in-domain radius bound per model (minus branches stop before the pole)
inline double radius_bound(const OscillatorModel& m) {
    if (m.profile.kind != ProfileKind::PowerLaw &&
        m.profile.sign == SignBranch::Minus && m.profile.lambda > 0.0)
        return 0.9 / std::sqrt(m.profile.lambda);
    return 2.0;
}

inline PhaseState random_state(std::mt19937_64& rng,
                               const OscillatorModel& model, bool collinear) {
    std::uniform_real_distribution<double> rad(0.05, radius_bound(model));
    std::uniform_real_distribution<double> speed(-2.0, 2.0);
    const Vec u = random_unit(rng, model.dim);
    PhaseState s;
    s.x.assign(model.dim, 0.0);
    s.v.assign(model.dim, 0.0);
    const double r = rad(rng);
    // collinearity is between the family position (shifted if applicable)
    // and the velocity
    for (std::size_t i = 0; i < model.dim; ++i) {
        s.x[i] = r * u[i];
        if (model.profile.kind == ProfileKind::ShiftedMl)
            s.x[i] -= model.profile.shift[i];
    }
    if (collinear) {
        const double sp = speed(rng);
        for (std::size_t i = 0; i < model.dim; ++i) s.v[i] = sp * u[i];
    } else {
        const Vec w = random_unit(rng, model.dim);
        const double sp = speed(rng);
        for (std::size_t i = 0; i < model.dim; ++i) s.v[i] = sp * w[i];
    }
    return s;
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Criterion 1: closed-form residuals (test hook: omega_scale != 1 must fail)
// ---------------------------------------------------------------------------

inline VerificationReport closed_form_residual_check(
    const std::string& family, double tolerance = 1e-9,
    double omega_scale = 1.0, std::size_t samples = 1000) {
    using namespace detail;
    if (family == "ML1")
        return closed_form_residual_report(
            "closed_form_residual.ml1", ml1_grid(),
            [](const OscillatorModel& m, const PhaseState& s, const Vec& a) {
                return ml1_equation(m.profile.lambda, branch_sign(m.profile.sign),
                                    m.omega0, s, a);
            },
            tolerance, omega_scale, samples);
    if (family == "PL1")
        return closed_form_residual_report(
            "closed_form_residual.pl1", pl1_grid(),
            [](const OscillatorModel& m, const PhaseState& s, const Vec& a) {
                return pl1_equation(m.profile.upsilon, m.omega0, s, a);
            },
            tolerance, omega_scale, samples);
    if (family == "ML2")
        return closed_form_residual_report(
            "closed_form_residual.ml2", ml2_grid(),
            [](const OscillatorModel& m, const PhaseState& s, const Vec& a) {
                return ml2_equation(m.profile.lambda, branch_sign(m.profile.sign),
                                    m.zeta_norm_sq(), m.omega0, s, a);
            },
            tolerance, omega_scale, samples);
    if (family == "PL2")
        return closed_form_residual_report(
            "closed_form_residual.pl2", pl2_grid(),
            [](const OscillatorModel& m, const PhaseState& s, const Vec& a) {
                return pl2_equation(m.profile.upsilon, m.zeta_norm_sq(),
                                    m.omega0, s, a);
            },
            tolerance, omega_scale, samples);
    if (family == "SHIFTED_ML1")
        return closed_form_residual_report(
            "closed_form_residual.shifted_ml1", shifted_grid(),
            [](const OscillatorModel& m, const PhaseState& s, const Vec& a) {
                return shifted_ml1_equation(m.profile.lambda,
                                            branch_sign(m.profile.sign),
                                            m.profile.shift, m.omega0, s, a);
            },
            tolerance, omega_scale, samples);
    throw std::invalid_argument("closed_form_residual_check: unknown family " +
                                family);
}

// ---------------------------------------------------------------------------
// Criteria 2-4: benchmark integration, energy, linearization
// ---------------------------------------------------------------------------

inline VerificationReport integration_error_check(ode::Method method,
                                                  double tolerance) {
    using namespace detail;
    const auto orbit = benchmark_orbit();
    const auto traj = benchmark_trajectory(method, 10.0);
    const double err = max_position_error(traj, orbit);
    std::ostringstream notes;
    notes << "max per-component position error against the closed form over "
             "10 periods ("
          << (method == ode::Method::Rk4Fixed ? "RK4, dt = T/2000"
                                              : "adaptive 5(4), rel_tol 1e-10")
          << ")";
    return make_report(method == ode::Method::Rk4Fixed
                           ? "integration_error.rk4_ml1"
                           : "integration_error.rk45_ml1",
                       err, err, tolerance, notes.str());
}

inline VerificationReport energy_drift_check(ode::Method method,
                                             double tolerance) {
    using namespace detail;
    const auto traj = benchmark_trajectory(method, 10.0);
    const double e0 = traj.samples.front().energy;
    double drift = 0.0;
    for (const auto& s : traj.samples)
        drift = std::max(drift, std::abs(s.energy - e0) / std::abs(e0));
    return make_report(method == ode::Method::Rk4Fixed
                           ? "energy_drift.rk4_ml1"
                           : "energy_drift.rk45_ml1",
                       drift, drift, tolerance,
                       "relative total-energy drift over 10 periods");
}

inline VerificationReport energy_formula_check(const std::string& family,
                                               double tolerance) {
    using namespace detail;
    double dev = 0.0;
    std::ostringstream notes;
    if (family == "ML1") {
        const auto model = benchmark_model();
        const auto orbit = benchmark_orbit();
        const double S = dot(orbit.amplitudes, orbit.amplitudes);
        const double lit = 0.5 * (model.omega0 * model.omega0 /
                                  (1.0 + model.profile.lambda * S)) * S;
        const double e0 = dynamics::total_energy(
            model, closed_form::evaluate_orbit(orbit, 0.0));
        dev = std::abs(e0 - lit) / std::abs(lit);
        notes << "turning-point energy vs (1/2) Omega^2 sum B^2 = " << lit;
        return make_report("energy_formula.ml1", dev, dev, tolerance,
                           notes.str());
    }
    if (family == "PL1") {
        const auto model = pl1_model(1.3, 1.0, 2, 1.1);
        const auto orbit = closed_form::build_orbit(model, {0.9, 0.4}, 0.0);
        const double S = dot(orbit.amplitudes, orbit.amplitudes);
        const double lit = 0.5 * model.omega0 * model.omega0 *
                           model.profile.k *
                           std::pow(S, model.profile.upsilon + 1.0);
        const double e0 = dynamics::total_energy(
            model, closed_form::evaluate_orbit(orbit, 0.0));
        dev = std::abs(e0 - lit) / std::abs(lit);
        notes << "turning-point energy vs (1/2) w0^2 k (sum C^2)^(ups+1) = "
              << lit;
        return make_report("energy_formula.pl1", dev, dev, tolerance,
                           notes.str());
    }
    if (family == "SHIFTED_ML1") {
        const auto model = benchmark_shifted_model();
        const auto orbit = benchmark_shifted_orbit();
        const double S = dot(orbit.amplitudes, orbit.amplitudes);
        const double lit = 0.5 * orbit.Omega * orbit.Omega * S;
        const double e0 = dynamics::total_energy(
            model, closed_form::evaluate_orbit(orbit, 0.0));
        dev = std::abs(e0 - lit) / std::abs(lit);
        notes << "turning-point energy vs (1/2) Omega^2 sum A^2 = " << lit;
        return make_report("energy_formula.shifted_ml1", dev, dev, tolerance,
                           notes.str());
    }
    throw std::invalid_argument("energy_formula_check: unknown family " +
                                family);
}

inline VerificationReport linearization_check(const std::string& which,
                                              double tolerance) {
    using namespace detail;
    const bool shifted = which.find("shifted") != std::string::npos;
    const auto model = shifted ? benchmark_shifted_model() : benchmark_model();
    const auto orbit = shifted ? benchmark_shifted_orbit() : benchmark_orbit();
    const double T = 2.0 * M_PI / orbit.Omega;
    ode::IntegratorConfig cfg;
    cfg.method = ode::Method::Rk4Fixed;
    cfg.dt = T / 2000.0;
    cfg.t_end = 10.0 * T;
    const auto traj =
        ode::integrate(model, dynamics::EomForm::El2Direct,
                       closed_form::evaluate_orbit(orbit, 0.0), cfg);
    const auto ref = transforms::to_reference(model, traj);
    if (which.find("sho") != std::string::npos) {
        const auto rep = transforms::sho_residual(ref, model.omega0, tolerance);
        std::ostringstream notes;
        notes << "RMS of dq~/dtau + w0^2 q on the mapped benchmark "
                 "trajectory (finite-difference limited); max = "
              << rep.max_residual;
        return make_report(shifted ? "linearization.shifted_ml1_sho"
                                   : "linearization.ml1_sho",
                           rep.rms_residual, rep.rms_residual, tolerance,
                           notes.str());
    }
    const auto fit = transforms::cosine_fit(ref);
    const double dev = std::abs(fit.omega - model.omega0) / model.omega0;
    std::ostringstream notes;
    notes << "cosine fit of q(tau): omega = " << fit.omega
          << ", expected omega0 = " << model.omega0
          << ", fit rms = " << fit.rms;
    return make_report(shifted ? "linearization.shifted_ml1_fit"
                               : "linearization.ml1_fit",
                       dev, dev, tolerance, notes.str());
}

// ---------------------------------------------------------------------------
// Criterion 5: invariance suite
// ---------------------------------------------------------------------------

inline VerificationReport collinear_forms_check(double tolerance) {
    using namespace detail;
    std::mt19937_64 rng(0x5eed0001u);
    ResidualStats stats;
    for (const auto& model : invariance_models()) {
        for (int it = 0; it < 10000; ++it) {
            const auto s = random_state(rng, model, true);
            const Vec a1 =
                dynamics::acceleration(model, dynamics::EomForm::El2Direct, s);
            const Vec a2 =
                dynamics::acceleration(model, dynamics::EomForm::El2Mdot, s);
            const Vec a3 =
                dynamics::acceleration(model, dynamics::EomForm::El2Radial, s);
            double scale = 1.0;
            for (double c : a1) scale = std::max(scale, std::abs(c));
            for (std::size_t i = 0; i < a1.size(); ++i) {
                stats.add_value((a1[i] - a2[i]) / scale);
                stats.add_value((a1[i] - a3[i]) / scale);
            }
        }
    }
    return make_report("invariance.collinear_forms", stats.max, stats.rms(),
                       tolerance,
                       "direct/mdot/radial accelerations on 10^4 random "
                       "collinear in-domain states per family "
                       "(magnitude-scaled differences)");
}

inline VerificationReport newtonian_residual_check(double tolerance) {
    using namespace detail;
    std::mt19937_64 rng(0x5eed0002u);
    ResidualStats stats;
    for (const auto& model : invariance_models()) {
        for (int it = 0; it < 10000; ++it) {
            const auto s = random_state(rng, model, false);
            const Vec a =
                dynamics::acceleration(model, dynamics::EomForm::El2Direct, s);
            const Vec r = dynamics::newtonian_vector_residual(model, s, a);
            const Vec g = profiles::potential_gradient(model, s.x);
            double scale = 1.0;
            for (std::size_t i = 0; i < a.size(); ++i)
                scale = std::max({scale, std::abs(a[i]), std::abs(g[i])});
            for (double c : r) stats.add_value(c / scale);
        }
    }
    return make_report("invariance.newtonian_residual", stats.max, stats.rms(),
                       tolerance,
                       "Newtonian vector residual of direct-form "
                       "accelerations on 10^4 arbitrary states per family");
}

inline VerificationReport g_equals_mf2_check(double tolerance) {
    using namespace detail;
    ResidualStats stats;
    // closed-form f per family against the generic implementation, and
    // g = m f^2 with the specialized f
    auto run = [&](const OscillatorModel& model,
                   const std::function<double(double)>& f_spec, double rmax) {
        for (int k = 1; k <= 500; ++k) {
            const double r = rmax * k / 500.0;
            Vec x(model.dim, 0.0);
            x[0] = r;
            if (model.profile.kind == ProfileKind::ShiftedMl)
                for (std::size_t i = 0; i < model.dim; ++i)
                    x[i] = (i == 0 ? r : 0.0) - model.profile.shift[i];
            const double f = profiles::time_scale_f(model, x);
            const double fs = f_spec(r);
            const double g = profiles::space_scale_g(model, x);
            const double m = profiles::mass(model.profile, x);
            const double scale = std::max({1.0, std::abs(g), std::abs(fs)});
            stats.add_value((f - fs) / scale);
            stats.add_value((g - m * fs * fs) / scale);
        }
    };
    for (const auto sign : {SignBranch::Plus, SignBranch::Minus}) {
        const double lam = 0.8;
        const double s = branch_sign(sign);
        run(ml1_model(lam, sign, 2, 1.0),
            [=](double r) { return 1.0 / (1.0 + s * lam * r * r); },
            sign == SignBranch::Minus ? 0.9 / std::sqrt(lam) : 2.0);
    }
    run(pl1_model(1.3, 2.0, 2, 1.0), [](double) { return 3.0; }, 2.0);
    run(pl1_model(0.7, -0.5, 2, 1.0), [](double) { return 0.5; }, 2.0);
    {
        const double lam = 0.8, zeta = 1.5;
        OscillatorModel b;
        b.profile = mathews_lakshmanan(lam, SignBranch::Minus);
        b.family = Family::TypeB;
        b.dim = 2;
        b.zeta = {zeta, 0.0};
        run(b,
            [=](double r) {
                return lam * r * zeta / (1.0 - lam * r * r);
            },
            0.9 / std::sqrt(lam));
    }
    {
        auto c = shifted_model(0.6, SignBranch::Plus, {0.3, -0.4}, 1.0);
        run(c,
            [=](double y) { return 1.0 / (1.0 + 0.6 * y * y); },
            2.0);
    }
    return make_report("invariance.g_mf2", stats.max, stats.rms(), tolerance,
                       "g = m f^2 with f from the generic log-derivative "
                       "formula vs the per-family closed forms on a radius "
                       "grid");
}

inline VerificationReport ml2_matches_ml1_check(double tolerance) {
    using namespace detail;
    std::mt19937_64 rng(0x5eed0003u);
    ResidualStats stats;
    for (const auto sign : {SignBranch::Minus, SignBranch::Plus}) {
        for (double lam : {0.5, 1.0, 4.0}) {
            const auto a_model = ml1_model(lam, sign, 3, 1.0);
            const auto b_model = ml2_model(lam, sign, {1.0, 0.0, 0.0}, 1.0);
            for (int it = 0; it < 10000 / 6; ++it) {
                const auto s = random_state(rng, a_model, false);
                const Vec a = dynamics::acceleration(
                    a_model, dynamics::EomForm::El2Direct, s);
                const Vec b = dynamics::acceleration(
                    b_model, dynamics::EomForm::El2Direct, s);
                double scale = 1.0;
                for (double c : a) scale = std::max(scale, std::abs(c));
                for (std::size_t i = 0; i < a.size(); ++i)
                    stats.add_value((a[i] - b[i]) / scale);
            }
        }
    }
    return make_report(
        "invariance.ml2_matches_ml1", stats.max, stats.rms(), tolerance,
        "TypeB accelerations under zeta^2 = -+1/lambda equal the TypeA ones "
        "on random states (minus branch with a real zeta vector, plus branch "
        "with the formal negative zeta^2)");
}

// ---------------------------------------------------------------------------
// Criterion 6: frequency laws via the sweep runner
// ---------------------------------------------------------------------------

inline VerificationReport frequency_law_ml1_check(double tolerance) {
    sweep::SweepSpec spec;
    spec.family = Family::TypeA;
    spec.kind = ProfileKind::MathewsLakshmanan;
    spec.sign = SignBranch::Plus;
    spec.lambda = {0.0, 0.5, 1.0};
    spec.omega0 = {1.0};
    spec.amplitudes = {{1.0}};
    spec.periods = 10.0;
    spec.jobs = 2;
    const auto rows = sweep::run_sweep(spec);
    double worst = 0.0;
    std::ostringstream notes;
    notes << "measured Omega^2 vs w0^2/(1 + lambda sum B^2):";
    for (const auto& r : rows) {
        const double pred = r.omega_predicted * r.omega_predicted;
        const double meas = r.omega_measured * r.omega_measured;
        const double dev = std::abs(meas - pred) / pred;
        worst = std::max(worst, dev);
        notes << " lambda=" << r.point.lambda << " -> " << meas << " (expect "
              << pred << ")";
        if (r.status != "ok") notes << " [" << r.status << "]";
    }
    return make_report("frequency_law.ml1_lambda", worst, worst, tolerance,
                       notes.str());
}

inline VerificationReport frequency_law_pl1_check(double tolerance) {
    sweep::SweepSpec spec;
    spec.family = Family::TypeA;
    spec.kind = ProfileKind::PowerLaw;
    spec.k = {1.0};
    spec.upsilon = {1.0, 2.0};
    spec.omega0 = {1.0};
    spec.amplitudes = {{1.0}};
    spec.jobs = 2;
    const auto rows = sweep::run_sweep(spec);
    double worst = 0.0;
    std::ostringstream notes;
    notes << "measured Omega vs (1 + upsilon) w0:";
    for (const auto& r : rows) {
        const double dev =
            std::abs(r.omega_measured - r.omega_predicted) / r.omega_predicted;
        worst = std::max(worst, dev);
        notes << " upsilon=" << r.point.upsilon << " -> " << r.omega_measured
              << " (expect " << r.omega_predicted << ")";
        if (r.status != "ok") notes << " [" << r.status << "]";
    }
    return make_report("frequency_law.pl1_upsilon", worst, worst, tolerance,
                       notes.str());
}

// ---------------------------------------------------------------------------
// Criterion 7: RK4 convergence order on the benchmark
// ---------------------------------------------------------------------------

inline VerificationReport convergence_order_check(double tolerance) {
    using namespace detail;
    const auto model = benchmark_model();
    const auto orbit = benchmark_orbit();
    const double T = 2.0 * M_PI / orbit.Omega;
    const auto init = closed_form::evaluate_orbit(orbit, 0.0);
    std::vector<double> errs;
    for (const double div : {250.0, 500.0, 1000.0, 2000.0}) {
        ode::IntegratorConfig cfg;
        cfg.method = ode::Method::Rk4Fixed;
        cfg.dt = T / div;
        cfg.t_end = T;
        errs.push_back(max_position_error(
            ode::integrate(model, dynamics::EomForm::El2Direct, init, cfg),
            orbit));
    }
    double worst_dev = 0.0;
    std::ostringstream notes;
    notes << "error-reduction exponents per dt halving:";
    for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
        const double p = std::log2(errs[i] / errs[i + 1]);
        worst_dev = std::max(worst_dev, std::abs(p - 4.0));
        notes << ' ' << p;
    }
    notes << " (target range [3.7, 4.3])";
    return make_report("convergence.rk4_order", worst_dev, worst_dev,
                       tolerance, notes.str());
}

// ---------------------------------------------------------------------------
// Criterion 8: power-law type-II sign regime
// ---------------------------------------------------------------------------

inline VerificationReport pl2_sign_regime_check(double tolerance) {
    using namespace detail;
    const auto positive = closed_form_residual_check("PL2", tolerance);
    std::ostringstream notes;
    notes << "empirically valid sign regime: lambda * sum B^2 > 0 (the "
             "power-law prefactor positive); residual max = "
          << positive.max_residual << " over the grid. ";
    // the real-vector reading lambda = -1/xi^2 forces lambda < 0, which
    // makes Omega^2 = w0^2/(lambda sum B^2) negative
    bool rejected = false;
    try {
        auto neg = pl2_model(-1.0, 1, 1.0);
        neg.zeta_sq_formal = 1.0;  // xi real: xi^2 = +1 = -1/lambda
        closed_form::build_orbit(neg, {1.0}, 0.0);
    } catch (const ConstraintError&) {
        rejected = true;
    }
    notes << "A real constant vector (xi^2 > 0) requires lambda = -1/xi^2 < "
             "0 and yields Omega^2 < 0 - no real oscillation (orbit "
             "construction "
          << (rejected ? "rejected as required" : "UNEXPECTEDLY ACCEPTED")
          << "); the published condition is compatible with real oscillation "
             "only as formal bookkeeping with xi^2 = -1/lambda < 0. ";
    // the energy chain: the first two expressions agree, the third matches
    // only when lambda = 1
    const double k = 2.0, S = 0.73, w0 = 1.3;
    const auto orbit =
        closed_form::build_orbit(pl2_model(k, 1, w0), {std::sqrt(S)}, 0.0);
    const double xi_sq = -1.0 / k;
    const double e1 = 0.5 * w0 * w0 * xi_sq * (k / S);
    const double e2 = -0.5 * orbit.Omega * orbit.Omega * k;
    const double e3 = 0.5 * orbit.Omega * orbit.Omega * xi_sq;
    notes << "Energy bookkeeping at lambda=" << k << ": (1/2)w0^2 xi^2 "
          << "(lambda/S) = " << e1 << " equals -(1/2)Omega^2 lambda = " << e2
          << "; the further reduction (1/2)Omega^2 xi^2 = " << e3
          << " differs unless lambda = 1.";
    const double max_res =
        rejected ? positive.max_residual : std::max(positive.max_residual, 1.0);
    return make_report("pl2_sign_regime", max_res, positive.rms_residual,
                       tolerance, notes.str());
}

// ---------------------------------------------------------------------------
// Registry
// ---------------------------------------------------------------------------

inline std::vector<Check> build_registry() {
    std::vector<Check> checks;
    auto add = [&](std::string name, std::string family, int criterion,
                   double tol,
                   std::function<VerificationReport(double)> run) {
        checks.push_back(
            {std::move(name), std::move(family), criterion, tol, std::move(run)});
    };
    for (const char* fam : {"ML1", "PL1", "ML2", "PL2", "SHIFTED_ML1"}) {
        std::string lower = fam;
        for (auto& c : lower) c = static_cast<char>(std::tolower(c));
        add("closed_form_residual." + lower, fam, 1, 1e-9,
            [fam](double tol) { return closed_form_residual_check(fam, tol); });
    }
    add("integration_error.rk4_ml1", "ML1", 2, 1e-6, [](double tol) {
        return integration_error_check(ode::Method::Rk4Fixed, tol);
    });
    add("integration_error.rk45_ml1", "ML1", 2, 1e-8, [](double tol) {
        return integration_error_check(ode::Method::Rk45Adaptive, tol);
    });
    add("energy_drift.rk4_ml1", "ML1", 3, 1e-8, [](double tol) {
        return energy_drift_check(ode::Method::Rk4Fixed, tol);
    });
    add("energy_drift.rk45_ml1", "ML1", 3, 1e-8, [](double tol) {
        return energy_drift_check(ode::Method::Rk45Adaptive, tol);
    });
    add("energy_formula.ml1", "ML1", 3, 1e-10,
        [](double tol) { return energy_formula_check("ML1", tol); });
    add("energy_formula.pl1", "PL1", 3, 1e-10,
        [](double tol) { return energy_formula_check("PL1", tol); });
    add("energy_formula.shifted_ml1", "SHIFTED_ML1", 3, 1e-10,
        [](double tol) { return energy_formula_check("SHIFTED_ML1", tol); });
    add("linearization.ml1_sho", "ML1", 4, 1e-4,
        [](double tol) { return linearization_check("ml1_sho", tol); });
    add("linearization.ml1_fit", "ML1", 4, 1e-6,
        [](double tol) { return linearization_check("ml1_fit", tol); });
    add("linearization.shifted_ml1_sho", "SHIFTED_ML1", 4, 1e-4,
        [](double tol) { return linearization_check("shifted_ml1_sho", tol); });
    add("linearization.shifted_ml1_fit", "SHIFTED_ML1", 4, 1e-6,
        [](double tol) { return linearization_check("shifted_ml1_fit", tol); });
    add("invariance.collinear_forms", "", 5, 1e-12,
        [](double tol) { return collinear_forms_check(tol); });
    add("invariance.newtonian_residual", "", 5, 1e-12,
        [](double tol) { return newtonian_residual_check(tol); });
    add("invariance.g_mf2", "", 5, 1e-12,
        [](double tol) { return g_equals_mf2_check(tol); });
    add("invariance.ml2_matches_ml1", "ML2", 5, 1e-12,
        [](double tol) { return ml2_matches_ml1_check(tol); });
    add("frequency_law.ml1_lambda", "ML1", 6, 1e-4,
        [](double tol) { return frequency_law_ml1_check(tol); });
    add("frequency_law.pl1_upsilon", "PL1", 6, 1e-4,
        [](double tol) { return frequency_law_pl1_check(tol); });
    add("convergence.rk4_order", "ML1", 7, 0.3,
        [](double tol) { return convergence_order_check(tol); });
    add("pl2_sign_regime", "PL2", 8, 1e-9,
        [](double tol) { return pl2_sign_regime_check(tol); });
    return checks;
}

inline const std::vector<Check>& registry() {
    static const std::vector<Check> checks = build_registry();
    return checks;
}

/// Runs the registered suite, optionally filtered by family tag and with
/// per-check tolerance overrides keyed by check name.
inline std::vector<VerificationReport> run_checks(
    const std::string& family_filter = {},
    const std::map<std::string, double>& tolerance_overrides = {}) {
    std::vector<VerificationReport> reports;
    for (const auto& check : registry()) {
        if (!family_filter.empty() && check.family != family_filter) continue;
        double tol = check.default_tolerance;
        if (const auto it = tolerance_overrides.find(check.name);
            it != tolerance_overrides.end())
            tol = it->second;
        reports.push_back(check.run(tol));
    }
    return reports;
}

}  // namespace pdmosc::checks
