// Explicit ODE integration of the PDM equations of motion with re-scaled
// time accumulated as an appended state variable and energy recorded per
// sample. Fixed-step classical RK4 and an embedded Dormand-Prince 5(4)
// adaptive pair with PI step-size control.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "pdmosc/core.hpp"
#include "pdmosc/dynamics.hpp"
#include "pdmosc/profiles.hpp"

namespace pdmosc::ode {

enum class Method { Rk4Fixed, Rk45Adaptive };

struct IntegratorConfig {
    Method method = Method::Rk4Fixed;
    double dt = 1e-3;        // fixed step, or initial step for the adaptive pair
    double abs_tol = 1e-12;  // adaptive only
    double rel_tol = 1e-10;  // adaptive only
    double t_end = 1.0;
    long max_steps = 2000000;
    int record_every = 1;
};

/// The trajectory left the mass domain; carries everything recorded up to
/// the last accepted step.
struct DomainExitError : DomainError {
    DomainExitError(const std::string& msg, Trajectory partial_,
                    PhaseState last_valid_)
        : DomainError(msg),
          partial(std::move(partial_)),
          last_valid(std::move(last_valid_)) {}
    Trajectory partial;
    PhaseState last_valid;
};

namespace detail {

// State layout: (x_1..x_n, v_1..v_n [, tau]).
struct System {
    const OscillatorModel& model;
    dynamics::EomForm form;
    std::size_t n;
    bool with_tau;

    void rhs(double t, const Vec& y, Vec& dy) const {
        PhaseState s;
        s.t = t;
        s.x.assign(y.begin(), y.begin() + static_cast<long>(n));
        s.v.assign(y.begin() + static_cast<long>(n),
                   y.begin() + static_cast<long>(2 * n));
        const Vec a = dynamics::acceleration(model, form, s);
        for (std::size_t i = 0; i < n; ++i) {
            dy[i] = s.v[i];
            dy[n + i] = a[i];
        }
        if (with_tau) dy[2 * n] = profiles::time_scale_f(model, s.x);
    }

    PhaseState unpack(double t, const Vec& y) const {
        PhaseState s;
        s.t = t;
        s.x.assign(y.begin(), y.begin() + static_cast<long>(n));
        s.v.assign(y.begin() + static_cast<long>(n),
                   y.begin() + static_cast<long>(2 * n));
        return s;
    }
};

struct Recorder {
    const OscillatorModel& model;
    const System& sys;
    Trajectory traj;
    long accepted = 0;
    int record_every = 1;
    double last_recorded_t = -std::numeric_limits<double>::infinity();

    void record(double t, const Vec& y) {
        if (t <= last_recorded_t) return;
        TrajectorySample s;
        s.state = sys.unpack(t, y);
        s.tau = sys.with_tau ? y[2 * sys.n]
                             : std::numeric_limits<double>::quiet_NaN();
        s.energy = dynamics::total_energy(model, s.state);
        traj.samples.push_back(std::move(s));
        last_recorded_t = t;
    }

    void maybe_record(double t, const Vec& y, bool final_step) {
        ++accepted;
        if (final_step || accepted % record_every == 0) record(t, y);
    }
};

// One classical RK4 step. The combined increment is h * (sum/6) per
// component, which keeps the tau component an exact h when f == 1.
inline void rk4_step(const System& sys, double t, double h, Vec& y, Vec& k1,
                     Vec& k2, Vec& k3, Vec& k4, Vec& tmp) {
    const std::size_t m = y.size();
    sys.rhs(t, y, k1);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    sys.rhs(t + 0.5 * h, tmp, k2);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    sys.rhs(t + 0.5 * h, tmp, k3);
    for (std::size_t i = 0; i < m; ++i) tmp[i] = y[i] + h * k3[i];
    sys.rhs(t + h, tmp, k4);
    for (std::size_t i = 0; i < m; ++i)
        y[i] += h * ((k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0);
}

// Dormand-Prince 5(4) tableau.
inline constexpr double kDp[7][6] = {
    {},
    {1.0 / 5.0},
    {3.0 / 40.0, 9.0 / 40.0},
    {44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0},
    {19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0},
    {9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0,
     -5103.0 / 18656.0},
    {35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0,
     11.0 / 84.0},
};
inline constexpr double kDpC[7] = {0.0,       1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0,
                                   8.0 / 9.0, 1.0,       1.0};
// Difference between the 5th- and 4th-order weights.
inline constexpr double kDpErr[7] = {
    71.0 / 57600.0,      0.0,          -71.0 / 16695.0, 71.0 / 1920.0,
    -17253.0 / 339200.0, 22.0 / 525.0, -1.0 / 40.0};

}  // namespace detail

/// Integrate the chosen equation form from the initial state to t_end.
/// Reduced (collinear-only) forms are refused when the initial state fails
/// the collinearity gate. Re-scaled time is carried as an appended state
/// component (NaN for models without a real time-scale factor).
inline Trajectory integrate(const OscillatorModel& model,
                            dynamics::EomForm form, const PhaseState& initial,
                            const IntegratorConfig& config) {
    if (initial.x.size() != model.dim || initial.v.size() != model.dim)
        throw std::invalid_argument("integrate: state dimension mismatch");
    if (!(config.t_end > initial.t))
        throw std::invalid_argument("integrate: t_end must exceed t_start");
    if (dynamics::requires_collinear(form)) {
        const Vec pos = profiles::shifted_position(model.profile, initial.x);
        if (collinearity_defect(pos, initial.v) > kCollinearGateTol)
            throw CollinearityError(
                "integrate: reduced equation forms need collinear initial "
                "states");
    }

    detail::System sys{model, form, model.dim, model.has_real_time_scale()};
    const std::size_t m = sys.with_tau ? 2 * model.dim + 1 : 2 * model.dim;
    Vec y(m, 0.0);
    std::copy(initial.x.begin(), initial.x.end(), y.begin());
    std::copy(initial.v.begin(), initial.v.end(),
              y.begin() + static_cast<long>(model.dim));

    detail::Recorder rec{model, sys, Trajectory{model, {}}, 0,
                         std::max(1, config.record_every)};

    double t = initial.t;
    auto domain_exit = [&](const char* what, const Vec& ylast,
                           double tlast) -> DomainExitError {
        rec.record(tlast, ylast);  // keep the last accepted state
        return DomainExitError(std::string("integrate: left the mass domain (") +
                                   what + ")",
                               rec.traj, sys.unpack(tlast, ylast));
    };

    try {
        rec.record(t, y);
    } catch (const DomainError& e) {
        throw DomainExitError(
            std::string("integrate: initial state out of domain (") +
                e.what() + ")",
            Trajectory{model, {}}, initial);
    }

    if (config.method == Method::Rk4Fixed) {
        if (!(config.dt > 0.0))
            throw std::invalid_argument("integrate: dt must be > 0");
        Vec k1(m), k2(m), k3(m), k4(m), tmp(m);
        long steps = 0;
        while (t < config.t_end - 1e-14 * std::abs(config.t_end)) {
            if (++steps > config.max_steps)
                throw StepLimitError("integrate: max_steps exceeded");
            double h = config.dt;
            if (t + 1.5 * h >= config.t_end) h = config.t_end - t;
            const Vec y_prev = y;
            try {
                detail::rk4_step(sys, t, h, y, k1, k2, k3, k4, tmp);
            } catch (const DomainError& e) {
                throw domain_exit(e.what(), y_prev, t);
            }
            t += h;
            try {
                rec.maybe_record(t, y, t >= config.t_end);
            } catch (const DomainError& e) {
                throw domain_exit(e.what(), y_prev, t - h);
            }
        }
        return rec.traj;
    }

    // Adaptive Dormand-Prince 5(4) with PI control: safety 0.9, step growth
    // clamped to [0.2, 5.0].
    const double safety = 0.9;
    const double beta = 0.04;
    const double expo1 = 0.2 - beta * 0.75;
    double facold = 1e-4;
    double h = config.dt > 0.0 ? config.dt
                               : (config.t_end - initial.t) / 100.0;
    const double h_min =
        1e-14 * std::max(std::abs(config.t_end), std::abs(initial.t) + 1.0);

    std::vector<Vec> k(7, Vec(m, 0.0));
    Vec ytmp(m), y5(m), err_vec(m);
    bool have_k1 = false;
    long steps = 0;
    while (t < config.t_end - 1e-14 * std::abs(config.t_end)) {
        if (++steps > config.max_steps)
            throw StepLimitError("integrate: max_steps exceeded");
        if (h < h_min)
            // a collapsing step is how the controller detects a finite-time
            // boundary of the mass domain
            throw domain_exit("step size underflow at a domain boundary", y, t);
        if (t + h > config.t_end) h = config.t_end - t;

        bool stage_domain_error = false;
        std::string stage_what;
        try {
            if (!have_k1) sys.rhs(t, y, k[0]);
            for (int stg = 1; stg < 7; ++stg) {
                for (std::size_t i = 0; i < m; ++i) {
                    double acc = 0.0;
                    for (int j = 0; j < stg; ++j)
                        acc += detail::kDp[stg][j] * k[j][i];
                    ytmp[i] = y[i] + h * acc;
                }
                sys.rhs(t + detail::kDpC[stg] * h, ytmp, k[stg]);
            }
        } catch (const DomainError& e) {
            stage_domain_error = true;
            stage_what = e.what();
        }
        if (stage_domain_error) {
            // a trial stage crossed the domain boundary: shrink and retry,
            // declare an exit only once the step cannot shrink further
            have_k1 = false;
            if (h <= 4.0 * h_min) throw domain_exit(stage_what.c_str(), y, t);
            h *= 0.2;
            continue;
        }

        // 5th-order solution is the last stage's argument (FSAL pair)
        for (std::size_t i = 0; i < m; ++i) {
            double acc = 0.0;
            for (int j = 0; j < 6; ++j) acc += detail::kDp[6][j] * k[j][i];
            y5[i] = y[i] + h * acc;
            double eacc = 0.0;
            for (int j = 0; j < 7; ++j) eacc += detail::kDpErr[j] * k[j][i];
            err_vec[i] = h * eacc;
        }
        double err = 0.0;
        for (std::size_t i = 0; i < m; ++i) {
            const double sc = config.abs_tol +
                              config.rel_tol *
                                  std::max(std::abs(y[i]), std::abs(y5[i]));
            const double q = err_vec[i] / sc;
            err += q * q;
        }
        err = std::sqrt(err / static_cast<double>(m));
        if (!std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            const Vec y_prev = y;
            t += h;
            y = y5;
            k[0] = k[6];  // FSAL
            have_k1 = true;
            try {
                rec.maybe_record(t, y, t >= config.t_end);
            } catch (const DomainError& e) {
                throw domain_exit(e.what(), y_prev, t - h);
            }
            double factor = safety * std::pow(err > 0.0 ? err : 1e-16, -expo1) *
                            std::pow(facold, beta);
            factor = std::clamp(factor, 0.2, 5.0);
            facold = std::max(err, 1e-4);
            h *= factor;
        } else {
            double factor = safety * std::pow(err, -expo1);
            factor = std::clamp(factor, 0.2, 1.0);
            h *= factor;
            have_k1 = true;  // k1 is still valid at unchanged (t, y)
        }
    }
    return rec.traj;
}

/// Period from linear-interpolated zero crossings of one coordinate about
/// its mean, averaged over the available cycles.
inline double measure_period(const Trajectory& traj, std::size_t axis) {
    if (traj.samples.size() < 3)
        throw InsufficientCrossingsError("measure_period: too few samples");
    if (axis >= traj.model.dim)
        throw std::invalid_argument("measure_period: axis out of range");

    double mean = 0.0;
    for (const auto& s : traj.samples) mean += s.state.x[axis];
    mean /= static_cast<double>(traj.samples.size());

    std::vector<double> ups, downs, all;
    for (std::size_t i = 0; i + 1 < traj.samples.size(); ++i) {
        const double w0 = traj.samples[i].state.x[axis] - mean;
        const double w1 = traj.samples[i + 1].state.x[axis] - mean;
        if (w0 == 0.0 || w0 * w1 >= 0.0) continue;
        const double t0 = traj.samples[i].state.t;
        const double t1 = traj.samples[i + 1].state.t;
        const double tc = t0 - w0 * (t1 - t0) / (w1 - w0);
        all.push_back(tc);
        (w0 < 0.0 ? ups : downs).push_back(tc);
    }
    std::vector<double> periods;
    for (std::size_t i = 1; i < ups.size(); ++i)
        periods.push_back(ups[i] - ups[i - 1]);
    for (std::size_t i = 1; i < downs.size(); ++i)
        periods.push_back(downs[i] - downs[i - 1]);
    if (periods.empty()) {
        if (all.size() >= 2) {
            // only alternating crossings available: half-period spacing
            double acc = 0.0;
            for (std::size_t i = 1; i < all.size(); ++i)
                acc += all[i] - all[i - 1];
            return 2.0 * acc / static_cast<double>(all.size() - 1);
        }
        throw InsufficientCrossingsError(
            "measure_period: need at least two sign changes about the mean");
    }
    double acc = 0.0;
    for (double p : periods) acc += p;
    return acc / static_cast<double>(periods.size());
}

}  // namespace pdmosc::ode
