// Parameter-sweep runner: builds a model per grid point, integrates its
// closed-form initial conditions, and tabulates predicted versus measured
// frequencies and energies. Points run independently on a bounded worker
// pool; rows keep grid order regardless of the thread count.
#pragma once

#include <atomic>
#include <cmath>
#include <cstddef>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "pdmosc/closed_form.hpp"
#include "pdmosc/core.hpp"
#include "pdmosc/csv.hpp"
#include "pdmosc/integrate.hpp"
#include "pdmosc/transforms.hpp"

namespace pdmosc::sweep {

struct SweepSpec {
    Family family = Family::TypeA;
    ProfileKind kind = ProfileKind::MathewsLakshmanan;
    SignBranch sign = SignBranch::Plus;
    std::vector<double> lambda;   // deformation grid (ML kinds)
    std::vector<double> k;        // power-law prefactor grid
    std::vector<double> upsilon;  // power-law exponent grid
    std::vector<double> omega0;
    std::vector<Vec> amplitudes;
    Vec shift;  // TypeC displacement
    double phase = 0.0;
    double periods = 10.0;  // integration length in predicted periods
    ode::Method method = ode::Method::Rk45Adaptive;
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    long max_steps = 4000000;
    int record_every = 1;
    int jobs = 1;
};

struct SweepPoint {
    double lambda = 0.0;
    double k = 0.0;
    double upsilon = 0.0;
    double omega0 = 1.0;
    Vec amplitudes;
};

struct SweepRow {
    SweepPoint point;
    double amp_sq_sum = 0.0;
    double omega_predicted = std::numeric_limits<double>::quiet_NaN();
    double omega_measured = std::numeric_limits<double>::quiet_NaN();
    double energy_predicted = std::numeric_limits<double>::quiet_NaN();
    double energy_measured = std::numeric_limits<double>::quiet_NaN();
    double energy_drift = std::numeric_limits<double>::quiet_NaN();
    std::string status;  // ok | domain_exit | error
    std::string note;
};

inline std::vector<SweepPoint> expand_grid(const SweepSpec& spec) {
    std::vector<SweepPoint> points;
    const bool is_power = spec.kind == ProfileKind::PowerLaw;
    const auto& def_a = is_power ? spec.k : spec.lambda;
    const std::vector<double> one{0.0};
    const auto& def_b = is_power ? spec.upsilon : one;
    for (double a : def_a)
        for (double b : def_b)
            for (double w0 : spec.omega0)
                for (const auto& amps : spec.amplitudes) {
                    SweepPoint p;
                    if (is_power) {
                        p.k = a;
                        p.upsilon = b;
                    } else {
                        p.lambda = a;
                    }
                    p.omega0 = w0;
                    p.amplitudes = amps;
                    points.push_back(std::move(p));
                }
    return points;
}

inline OscillatorModel model_for_point(const SweepSpec& spec,
                                       const SweepPoint& p) {
    OscillatorModel m;
    m.dim = p.amplitudes.size();
    m.family = spec.family;
    m.omega0 = p.omega0;
    switch (spec.kind) {
        case ProfileKind::MathewsLakshmanan:
            m.profile = p.lambda > 0.0
                            ? mathews_lakshmanan(p.lambda, spec.sign)
                            : mathews_lakshmanan(0.0, spec.sign);
            break;
        case ProfileKind::PowerLaw:
            m.profile = power_law(p.k, p.upsilon);
            break;
        case ProfileKind::ShiftedMl:
            m.profile = shifted_ml(p.lambda, spec.sign, spec.shift);
            break;
    }
    if (spec.family == Family::TypeB) {
        if (spec.kind == ProfileKind::MathewsLakshmanan) {
            const double target = closed_form::ml2_required_zeta_sq(m.profile);
            if (target > 0.0) {
                // real constant vector along the amplitude direction
                const double na = norm(p.amplitudes);
                m.zeta.assign(m.dim, 0.0);
                for (std::size_t i = 0; i < m.dim; ++i)
                    m.zeta[i] = p.amplitudes[i] / na * std::sqrt(target);
            } else {
                m.zeta_sq_formal = target;
            }
        } else {
            m.zeta_sq_formal = -1.0 / p.k;  // formal type-II bookkeeping
        }
    }
    validate(m);
    return m;
}

/// Frequency of the mapped reference coordinate against lab time, for
/// families whose trajectories collapse before completing a cycle (the
/// power-law type-I arc): q(t) is sinusoidal at the predicted frequency, so
/// a cosine fit over the pre-collapse window measures it without crossings.
inline double fit_frequency_in_lab_time(const OscillatorModel& model,
                                        const Trajectory& traj,
                                        double omega_seed) {
    transforms::ReferenceTrajectory ref;
    for (const auto& s : traj.samples) {
        auto [q, qt] = transforms::map_point(model, s.state);
        ref.tau.push_back(s.state.t);
        ref.q.push_back(std::move(q));
        ref.qtilde.push_back(std::move(qt));
    }
    return transforms::cosine_fit(ref, omega_seed).omega;
}

inline std::string append_note(const std::string& a, const std::string& b) {
    if (a.empty()) return b;
    if (b.empty()) return a;
    return a + "; " + b;
}

inline SweepRow run_point(const SweepSpec& spec, const SweepPoint& p) {
    SweepRow row;
    row.point = p;
    row.amp_sq_sum = dot(p.amplitudes, p.amplitudes);
    try {
        const auto model = model_for_point(spec, p);
        const auto orbit = closed_form::build_orbit(model, p.amplitudes,
                                                    spec.phase);
        row.omega_predicted = orbit.Omega;
        row.energy_predicted = orbit.energy;
        const double T = 2.0 * M_PI / orbit.Omega;
        const bool collapsing = orbit.family == closed_form::OrbitFamily::Pl1;

        ode::IntegratorConfig cfg;
        cfg.method = spec.method;
        cfg.rel_tol = spec.rel_tol;
        cfg.abs_tol = spec.abs_tol;
        cfg.max_steps = spec.max_steps;
        cfg.record_every = spec.record_every;
        cfg.dt = spec.method == ode::Method::Rk4Fixed ? T / 2000.0 : T / 500.0;
        // power-law type-I orbits reach the origin (vanishing mass) at the
        // quarter period; measure inside the pre-collapse window
        cfg.t_end = collapsing ? 0.45 * T : spec.periods * T;

        Trajectory traj;
        try {
            traj = ode::integrate(model, dynamics::EomForm::El2Direct,
                                  closed_form::evaluate_orbit(orbit, 0.0), cfg);
            row.status = "ok";
        } catch (const ode::DomainExitError& e) {
            traj = e.partial;
            row.status = "domain_exit";
            row.note = e.what();
        }
        if (traj.samples.size() < 8) {
            row.status = "error";
            row.note = "too few samples before the domain exit";
            return row;
        }

        const double offset = closed_form::ml2_energy_offset(model);
        const double e0 = traj.samples.front().energy;
        row.energy_measured = e0 - offset;
        double drift = 0.0;
        for (const auto& s : traj.samples)
            drift = std::max(drift, std::abs(s.energy - e0) /
                                        std::max(1e-300, std::abs(e0)));
        row.energy_drift = drift;

        if (collapsing) {
            row.omega_measured =
                fit_frequency_in_lab_time(model, traj, orbit.Omega);
            row.note = append_note(row.note,
                                   "frequency from a sinusoid fit of the "
                                   "mapped coordinate over the pre-collapse "
                                   "arc");
        } else {
            row.omega_measured = 2.0 * M_PI / ode::measure_period(traj, 0);
        }
        if (offset != 0.0)
            row.note = append_note(
                row.note,
                "measured energy excludes the constant TypeB potential "
                "offset " + io::format_double(offset));
    } catch (const Error& e) {
        row.status = "error";
        row.note = e.what();
    } catch (const std::exception& e) {
        row.status = "error";
        row.note = e.what();
    }
    return row;
}

inline std::vector<SweepRow> run_sweep(const SweepSpec& spec) {
    const auto points = expand_grid(spec);
    std::vector<SweepRow> rows(points.size());
    const int jobs = std::max(1, spec.jobs);
    if (jobs == 1 || points.size() <= 1) {
        for (std::size_t i = 0; i < points.size(); ++i)
            rows[i] = run_point(spec, points[i]);
        return rows;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> workers;
    const int count = std::min<std::size_t>(jobs, points.size());
    workers.reserve(count);
    for (int w = 0; w < count; ++w)
        workers.emplace_back([&]() {
            while (true) {
                const std::size_t i = next.fetch_add(1);
                if (i >= points.size()) return;
                rows[i] = run_point(spec, points[i]);
            }
        });
    for (auto& t : workers) t.join();
    return rows;
}

inline void write_sweep_csv(std::ostream& os, const SweepSpec& spec,
                            const std::vector<SweepRow>& rows) {
    auto quote = [](const std::string& s) {
        std::string out = "\"";
        for (char c : s) {
            if (c == '"') out += '"';
            out += c;
        }
        out += '"';
        return out;
    };
    const char* kind = spec.kind == ProfileKind::MathewsLakshmanan
                           ? "MATHEWS_LAKSHMANAN"
                           : spec.kind == ProfileKind::PowerLaw ? "POWER_LAW"
                                                                : "SHIFTED_ML";
    os << "family,kind,sign,lambda,k,upsilon,omega0,amplitudes,amp_sq_sum,"
          "omega_predicted,omega_measured,omega_sq_measured,"
          "energy_predicted,energy_measured,energy_drift,status,note\n";
    const char* family = spec.family == Family::TypeA
                             ? "TYPE_A"
                             : spec.family == Family::TypeB ? "TYPE_B"
                                                            : "TYPE_C";
    for (const auto& r : rows) {
        std::ostringstream amps;
        for (std::size_t i = 0; i < r.point.amplitudes.size(); ++i) {
            if (i) amps << ';';
            amps << io::format_double(r.point.amplitudes[i]);
        }
        os << family << ',' << kind << ','
           << (spec.sign == SignBranch::Plus ? "PLUS" : "MINUS") << ','
           << io::format_double(r.point.lambda) << ','
           << io::format_double(r.point.k) << ','
           << io::format_double(r.point.upsilon) << ','
           << io::format_double(r.point.omega0) << ',' << amps.str() << ','
           << io::format_double(r.amp_sq_sum) << ','
           << io::format_double(r.omega_predicted) << ','
           << io::format_double(r.omega_measured) << ','
           << io::format_double(r.omega_measured * r.omega_measured) << ','
           << io::format_double(r.energy_predicted) << ','
           << io::format_double(r.energy_measured) << ','
           << io::format_double(r.energy_drift) << ',' << r.status << ','
           << quote(r.note) << '\n';
    }
}

}  // namespace pdmosc::sweep
