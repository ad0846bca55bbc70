// The nonlocal space-time point transformation: maps PDM trajectories to
// reference coordinates (q, tau) with q-tilde = dq/dtau = v sqrt(m), and
// verifies linearization into the constant-mass oscillator equation
// dq~/dtau + omega0^2 q = 0.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "pdmosc/core.hpp"
#include "pdmosc/profiles.hpp"

namespace pdmosc::transforms {

struct ReferenceTrajectory {
    std::vector<double> tau;
    std::vector<Vec> q;
    std::vector<Vec> qtilde;  // dq/dtau = v sqrt(m) per sample
};

/// Family-appropriate reference point:
///   TypeA: q = sqrt(m) x;  TypeB: q = sqrt(m) zeta;  TypeC: q = sqrt(m(y)) y.
/// Always q~ = v sqrt(m). The TypeB map is only derived for motion collinear
/// with the constant vector, so non-collinear inputs are rejected.
inline std::pair<Vec, Vec> map_point(const OscillatorModel& model,
                                     const PhaseState& s) {
    const double r = profiles::profile_radius(model.profile, s.x);
    const double m = profiles::mass_at(model.profile, r);
    const double sm = std::sqrt(m);
    Vec q(s.x.size(), 0.0);
    Vec qt(s.x.size(), 0.0);
    for (std::size_t i = 0; i < s.x.size(); ++i) qt[i] = sm * s.v[i];
    switch (model.family) {
        case Family::TypeA:
            for (std::size_t i = 0; i < s.x.size(); ++i) q[i] = sm * s.x[i];
            break;
        case Family::TypeB: {
            if (model.zeta.empty())
                throw ValidityError(
                    "map_point: TypeB mapping needs a real zeta vector");
            if (collinearity_defect(s.x, model.zeta) > kCollinearGateTol ||
                collinearity_defect(s.x, s.v) > kCollinearGateTol)
                throw ValidityError(
                    "map_point: TypeB mapping is valid only for motion "
                    "collinear with zeta");
            for (std::size_t i = 0; i < s.x.size(); ++i)
                q[i] = sm * model.zeta[i];
            break;
        }
        case Family::TypeC: {
            const Vec y = profiles::shifted_position(model.profile, s.x);
            for (std::size_t i = 0; i < s.x.size(); ++i) q[i] = sm * y[i];
            break;
        }
    }
    return {std::move(q), std::move(qt)};
}

/// Re-integrates dtau/dt = f(x(t)) over the trajectory samples with a
/// Simpson rule on cubic-Hermite-interpolated states, matching fourth-order
/// accuracy without resampling the trajectory.
inline std::vector<double> accumulate_tau(const OscillatorModel& model,
                                          const Trajectory& traj,
                                          double tau0 = 0.0) {
    std::vector<double> tau;
    tau.reserve(traj.samples.size());
    if (traj.samples.empty()) return tau;
    tau.push_back(tau0);
    const std::size_t n = traj.samples.front().state.x.size();
    Vec xmid(n, 0.0);
    for (std::size_t k = 0; k + 1 < traj.samples.size(); ++k) {
        const PhaseState& a = traj.samples[k].state;
        const PhaseState& b = traj.samples[k + 1].state;
        const double h = b.t - a.t;
        for (std::size_t i = 0; i < n; ++i)
            xmid[i] = 0.5 * (a.x[i] + b.x[i]) + 0.125 * h * (a.v[i] - b.v[i]);
        const double fa = profiles::time_scale_f(model, a.x);
        const double fm = profiles::time_scale_f(model, xmid);
        const double fb = profiles::time_scale_f(model, b.x);
        tau.push_back(tau.back() + h * ((fa + 4.0 * fm + fb) / 6.0));
    }
    return tau;
}

/// Maps every sample, pairing the stored re-scaled time with (q, q~).
inline ReferenceTrajectory to_reference(const OscillatorModel& model,
                                        const Trajectory& traj) {
    ReferenceTrajectory ref;
    ref.tau.reserve(traj.samples.size());
    ref.q.reserve(traj.samples.size());
    ref.qtilde.reserve(traj.samples.size());
    for (const auto& s : traj.samples) {
        if (std::isnan(s.tau))
            throw ValidityError(
                "to_reference: trajectory carries no re-scaled time (model "
                "has no real time-scale factor)");
        auto [q, qt] = map_point(model, s.state);
        ref.tau.push_back(s.tau);
        ref.q.push_back(std::move(q));
        ref.qtilde.push_back(std::move(qt));
    }
    return ref;
}

/// Evaluates dq~/dtau + omega0^2 q on interior samples with second-order
/// finite differences on the (generally nonuniform) tau grid.
inline VerificationReport sho_residual(const ReferenceTrajectory& ref,
                                       double omega0, double tolerance = 1e-4) {
    if (ref.tau.size() < 5)
        throw std::invalid_argument("sho_residual: need at least 5 samples");
    const double dir = ref.tau[1] - ref.tau[0];
    for (std::size_t k = 0; k + 1 < ref.tau.size(); ++k) {
        const double d = ref.tau[k + 1] - ref.tau[k];
        if (d == 0.0 || d * dir < 0.0)
            throw NonMonotoneTauError(
                "sho_residual: tau is not strictly monotone");
    }
    const double w2 = omega0 * omega0;
    const std::size_t n = ref.q.front().size();
    double max_res = 0.0, sum_sq = 0.0;
    std::size_t count = 0;
    for (std::size_t k = 1; k + 1 < ref.tau.size(); ++k) {
        const double hm = ref.tau[k] - ref.tau[k - 1];
        const double hp = ref.tau[k + 1] - ref.tau[k];
        const double wm = -hp / (hm * (hm + hp));
        const double w0 = (hp - hm) / (hm * hp);
        const double wp = hm / (hp * (hm + hp));
        for (std::size_t i = 0; i < n; ++i) {
            const double dqt = wm * ref.qtilde[k - 1][i] +
                               w0 * ref.qtilde[k][i] +
                               wp * ref.qtilde[k + 1][i];
            const double res = std::abs(dqt + w2 * ref.q[k][i]);
            max_res = std::max(max_res, res);
            sum_sq += res * res;
            ++count;
        }
    }
    const double rms = std::sqrt(sum_sq / static_cast<double>(count));
    return make_report("sho_residual", max_res, rms, tolerance);
}

struct CosineFit {
    Vec amplitudes;      // per-axis B_i
    double omega = 0.0;  // shared frequency
    double phase = 0.0;  // shared phase
    double rms = 0.0;    // root-mean-square misfit
    int iterations = 0;
};

namespace detail {

// Per-axis linear least squares q_i = a cos(w tau) + b sin(w tau) at fixed
// frequency; used to seed the shared phase and amplitudes.
inline void linear_seed(const ReferenceTrajectory& ref, double omega,
                        Vec& amps, double& phase) {
    const std::size_t n = ref.q.front().size();
    const std::size_t N = ref.tau.size();
    std::size_t dom = 0;
    double dom_max = -1.0;
    for (std::size_t i = 0; i < n; ++i) {
        double mx = 0.0;
        for (std::size_t k = 0; k < N; ++k)
            mx = std::max(mx, std::abs(ref.q[k][i]));
        if (mx > dom_max) {
            dom_max = mx;
            dom = i;
        }
    }
    double cc = 0.0, cs = 0.0, ss = 0.0, qc = 0.0, qs = 0.0;
    for (std::size_t k = 0; k < N; ++k) {
        const double c = std::cos(omega * ref.tau[k]);
        const double s = std::sin(omega * ref.tau[k]);
        cc += c * c;
        cs += c * s;
        ss += s * s;
        qc += ref.q[k][dom] * c;
        qs += ref.q[k][dom] * s;
    }
    const double det = cc * ss - cs * cs;
    double a = dom_max, b = 0.0;
    if (std::abs(det) > 1e-30) {
        a = (qc * ss - qs * cs) / det;
        b = (qs * cc - qc * cs) / det;
    }
    phase = std::atan2(-b, a);
    amps.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double num = 0.0, den = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            const double c = std::cos(omega * ref.tau[k] + phase);
            num += ref.q[k][i] * c;
            den += c * c;
        }
        amps[i] = den > 0.0 ? num / den : 0.0;
    }
}

// Solve the (small, symmetric) damped normal equations in place.
inline bool solve_dense(std::vector<Vec>& A, Vec& b) {
    const std::size_t n = b.size();
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(A[r][col]) > std::abs(A[piv][col])) piv = r;
        if (std::abs(A[piv][col]) < 1e-300) return false;
        std::swap(A[piv], A[col]);
        std::swap(b[piv], b[col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double fac = A[r][col] / A[col][col];
            for (std::size_t c = col; c < n; ++c) A[r][c] -= fac * A[col][c];
            b[r] -= fac * b[col];
        }
    }
    for (std::size_t r = n; r-- > 0;) {
        double acc = b[r];
        for (std::size_t c = r + 1; c < n; ++c) acc -= A[r][c] * b[c];
        b[r] = acc / A[r][r];
    }
    return true;
}

}  // namespace detail

/// Least-squares fit of q_i(tau) to B_i cos(omega tau + phi) with shared
/// omega and phi across axes (Levenberg-Marquardt with analytic Jacobian).
/// The frequency is seeded from zero crossings unless omega_seed > 0.
inline CosineFit cosine_fit(const ReferenceTrajectory& ref,
                            double omega_seed = 0.0) {
    if (ref.tau.size() < 5 || ref.q.size() != ref.tau.size())
        throw std::invalid_argument("cosine_fit: need at least 5 samples");
    const std::size_t n = ref.q.front().size();
    const std::size_t N = ref.tau.size();

    double qmax = 0.0;
    for (const auto& q : ref.q)
        for (double v : q) qmax = std::max(qmax, std::abs(v));
    if (qmax < 1e-300)
        throw FitDivergedError(
            "cosine_fit: zero signal, frequency indeterminate");

    const double span = std::abs(ref.tau.back() - ref.tau.front());
    double omega = omega_seed;
    if (!(omega > 0.0)) {
        // dominant-axis zero crossings give half-period spacings
        std::size_t dom = 0;
        double dom_max = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
            double mx = 0.0;
            for (std::size_t k = 0; k < N; ++k)
                mx = std::max(mx, std::abs(ref.q[k][i]));
            if (mx > dom_max) {
                dom_max = mx;
                dom = i;
            }
        }
        std::vector<double> crossings;
        for (std::size_t k = 0; k + 1 < N; ++k) {
            const double a = ref.q[k][dom];
            const double b = ref.q[k + 1][dom];
            if (a == 0.0 || a * b >= 0.0) continue;
            crossings.push_back(ref.tau[k] -
                                a * (ref.tau[k + 1] - ref.tau[k]) / (b - a));
        }
        if (crossings.size() >= 2)
            omega = M_PI * static_cast<double>(crossings.size() - 1) /
                    std::abs(crossings.back() - crossings.front());
        else if (span > 0.0)
            omega = 0.5 * M_PI / span;  // partial-arc fallback
        else
            throw FitDivergedError("cosine_fit: cannot seed the frequency");
    }

    Vec amps;
    double phase = 0.0;
    detail::linear_seed(ref, omega, amps, phase);

    const std::size_t P = n + 2;  // (B_1..B_n, omega, phi)
    auto cost_of = [&](const Vec& B, double w, double ph) {
        double c = 0.0;
        for (std::size_t k = 0; k < N; ++k) {
            const double ck = std::cos(w * ref.tau[k] + ph);
            for (std::size_t i = 0; i < n; ++i) {
                const double r = B[i] * ck - ref.q[k][i];
                c += r * r;
            }
        }
        return c;
    };

    double lambda = 1e-3;
    double cost = cost_of(amps, omega, phase);
    int iter = 0;
    bool converged = false;
    std::vector<Vec> JtJ(P, Vec(P, 0.0));
    Vec Jtr(P, 0.0);
    for (; iter < 200 && !converged; ++iter) {
        for (auto& row : JtJ) std::fill(row.begin(), row.end(), 0.0);
        std::fill(Jtr.begin(), Jtr.end(), 0.0);
        for (std::size_t k = 0; k < N; ++k) {
            const double arg = omega * ref.tau[k] + phase;
            const double ck = std::cos(arg);
            const double sk = std::sin(arg);
            for (std::size_t i = 0; i < n; ++i) {
                const double r = amps[i] * ck - ref.q[k][i];
                const double jB = ck;                          // d r / d B_i
                const double jw = -amps[i] * ref.tau[k] * sk;  // d r / d omega
                const double jp = -amps[i] * sk;               // d r / d phi
                JtJ[i][i] += jB * jB;
                JtJ[i][n] += jB * jw;
                JtJ[i][n + 1] += jB * jp;
                JtJ[n][n] += jw * jw;
                JtJ[n][n + 1] += jw * jp;
                JtJ[n + 1][n + 1] += jp * jp;
                Jtr[i] += jB * r;
                Jtr[n] += jw * r;
                Jtr[n + 1] += jp * r;
            }
        }
        for (std::size_t a = 0; a < P; ++a)
            for (std::size_t b = a + 1; b < P; ++b) JtJ[b][a] = JtJ[a][b];

        bool stepped = false;
        for (int attempt = 0; attempt < 25 && !stepped; ++attempt) {
            std::vector<Vec> A = JtJ;
            for (std::size_t d = 0; d < P; ++d)
                A[d][d] += lambda * std::max(JtJ[d][d], 1e-30);
            Vec delta = Jtr;
            for (double& v : delta) v = -v;
            if (!detail::solve_dense(A, delta)) {
                lambda *= 10.0;
                continue;
            }
            Vec amps_new = amps;
            for (std::size_t i = 0; i < n; ++i) amps_new[i] += delta[i];
            const double omega_new = omega + delta[n];
            const double phase_new = phase + delta[n + 1];
            const double cost_new = cost_of(amps_new, omega_new, phase_new);
            if (cost_new <= cost) {
                double step = std::abs(delta[n]) / std::max(std::abs(omega), 1e-12) +
                              std::abs(delta[n + 1]);
                for (std::size_t i = 0; i < n; ++i)
                    step += std::abs(delta[i]) / std::max(qmax, 1e-12);
                amps = std::move(amps_new);
                omega = omega_new;
                phase = phase_new;
                const double rel_impr =
                    (cost - cost_new) / std::max(cost, 1e-300);
                cost = cost_new;
                lambda = std::max(lambda / 3.0, 1e-14);
                stepped = true;
                if (step < 1e-14 || rel_impr < 1e-15) converged = true;
            } else {
                lambda *= 10.0;
            }
        }
        if (!stepped) {
            // damping saturated: accept the stationary point if the gradient
            // already vanished, otherwise report divergence
            double gnorm = 0.0;
            for (double g : Jtr) gnorm = std::max(gnorm, std::abs(g));
            if (gnorm < 1e-10 * std::max(1.0, cost)) {
                converged = true;
            } else {
                throw FitDivergedError("cosine_fit: damping saturated");
            }
        }
    }
    if (!converged)
        throw FitDivergedError("cosine_fit: no convergence in 200 iterations");

    // canonical form: positive frequency, dominant amplitude positive,
    // phase wrapped to (-pi, pi]
    if (omega < 0.0) {
        omega = -omega;
        phase = -phase;
    }
    std::size_t dom = 0;
    for (std::size_t i = 0; i < n; ++i)
        if (std::abs(amps[i]) > std::abs(amps[dom])) dom = i;
    if (amps[dom] < 0.0) {
        for (double& a : amps) a = -a;
        phase += M_PI;
    }
    phase = std::remainder(phase, 2.0 * M_PI);
    if (phase <= -M_PI) phase += 2.0 * M_PI;

    CosineFit fit;
    fit.amplitudes = std::move(amps);
    fit.omega = omega;
    fit.phase = phase;
    fit.rms = std::sqrt(cost / static_cast<double>(N * n));
    fit.iterations = iter;
    return fit;
}

/// Confirms along a trajectory that d/dt of the mapped q (finite differences
/// in lab time) matches the analytic sqrt(m) f v, i.e. that the substitution
/// satisfies the transformation recipe. For TypeB the recipe is derived for
/// motion co-directional with zeta; samples on the opposite ray are skipped
/// and counted in the notes.
inline VerificationReport verify_f_consistency(const OscillatorModel& model,
                                               const Trajectory& traj,
                                               double tolerance) {
    if (traj.samples.size() < 3)
        throw std::invalid_argument("verify_f_consistency: need >= 3 samples");
    const std::size_t n = model.dim;
    double max_dev = 0.0, sum_sq = 0.0;
    std::size_t count = 0, skipped = 0;
    for (std::size_t k = 1; k + 1 < traj.samples.size(); ++k) {
        const PhaseState& sm = traj.samples[k - 1].state;
        const PhaseState& s0 = traj.samples[k].state;
        const PhaseState& sp = traj.samples[k + 1].state;
        if (model.family == Family::TypeB &&
            dot(s0.x, model.zeta) <= 0.0) {
            ++skipped;
            continue;
        }
        const Vec qm = map_point(model, sm).first;
        const Vec q0 = map_point(model, s0).first;
        const Vec qp = map_point(model, sp).first;
        const double hm = s0.t - sm.t;
        const double hp = sp.t - s0.t;
        const double wm = -hp / (hm * (hm + hp));
        const double w0 = (hp - hm) / (hm * hp);
        const double wp = hm / (hp * (hm + hp));
        const double m = profiles::mass(model.profile, s0.x);
        const double f = profiles::time_scale_f(model, s0.x);
        const double smf = std::sqrt(m) * f;
        for (std::size_t i = 0; i < n; ++i) {
            const double dq_dt = wm * qm[i] + w0 * q0[i] + wp * qp[i];
            const double dev = std::abs(dq_dt - smf * s0.v[i]);
            max_dev = std::max(max_dev, dev);
            sum_sq += dev * dev;
            ++count;
        }
    }
    if (count == 0)
        throw ValidityError(
            "verify_f_consistency: no samples in the validity regime");
    std::ostringstream notes;
    notes << "compared d q/dt (finite differences) with sqrt(m) f v on "
          << count / n << " interior samples";
    if (skipped > 0)
        notes << "; skipped " << skipped
              << " samples outside the co-directional TypeB regime";
    return make_report("f_consistency", max_dev,
                       std::sqrt(sum_sq / static_cast<double>(count)),
                       tolerance, notes.str());
}

}  // namespace pdmosc::transforms
