// Right-hand sides and residual evaluators for the PDM equations of motion,
// plus the total energy.
//
// For a common mass multiplier m evaluated at the family position p (p = x,
// or p = x + shift for the shifted family), the component equations are
//
//   direct:   x_i'' + (m'/m) x_i' - (1/2)(d_i m / m) sum v^2 + d_i V/(m0 m) = 0
//   mdot:     x_i'' + (m'/(2m)) x_i'               + d_i V/(m0 m) = 0
//   radial:   x_i'' + (dm/dr/(2 r m)) (sum v^2) p_i + d_i V/(m0 m) = 0
//
// where m' = dm/dt. The reduced (mdot/radial) forms and the reduced Newtonian
// vector form rely on the parallel-vector identity (A.B)A = (A.A)B and are
// valid on collinear states (p parallel to v) only; the direct form and the
// full Newtonian vector form hold for arbitrary states and agree identically.
#pragma once

#include <cstddef>
#include <functional>
#include <stdexcept>

#include "pdmosc/core.hpp"
#include "pdmosc/profiles.hpp"

namespace pdmosc::dynamics {

enum class EomForm {
    El1,             // per-axis masses, decoupled (1-D per axis)
    El2Direct,       // common mass, component form, general states
    El2Mdot,         // common mass, reduced mdot form (collinear)
    El2Radial,       // common mass, reduced radial form (collinear)
    NewtonFull,      // common mass, Newtonian vector form, general states
    NewtonParallel,  // common mass, reduced Newtonian vector form (collinear)
};

inline bool requires_collinear(EomForm f) {
    return f == EomForm::El2Mdot || f == EomForm::El2Radial ||
           f == EomForm::NewtonParallel;
}

namespace detail {

struct CommonMassTerms {
    Vec pos;              // family position p
    double m = 0.0;       // mass multiplier at p
    double dm_over_r = 0.0;  // (dm/dr)/|p|
    double mdot = 0.0;    // dm/dt = (dm/dr/|p|) (p . v)
    double sumv2 = 0.0;
    Vec gradV;
};

inline CommonMassTerms common_terms(const OscillatorModel& model,
                                    const PhaseState& s) {
    CommonMassTerms t;
    t.pos = profiles::shifted_position(model.profile, s.x);
    const double r = norm(t.pos);
    t.m = profiles::mass_at(model.profile, r);
    if (std::abs(t.m) < kSingularMassEps)
        throw SingularMassError("equation of motion: |m| < 1e-14");
    t.dm_over_r = profiles::dm_dr_over_r_at(model.profile, r);
    t.mdot = t.dm_over_r * dot(t.pos, s.v);
    t.sumv2 = dot(s.v, s.v);
    t.gradV = profiles::potential_gradient(model, s.x);
    return t;
}

}  // namespace detail

/// Acceleration solving the chosen equation form at the given state.
/// El1 is meaningful for common-mass models only in one dimension, where the
/// common profile is trivially a per-axis mass; use el1_acceleration for
/// genuine per-axis specifications.
inline Vec acceleration(const OscillatorModel& model, EomForm form,
                        const PhaseState& s) {
    const auto t = detail::common_terms(model, s);
    const std::size_t n = s.x.size();
    const double m0m = model.m0 * t.m;
    Vec a(n, 0.0);
    switch (form) {
        case EomForm::El2Direct:
        case EomForm::NewtonFull:
            // identical algebra; the vector form is the unit-vector-weighted
            // sum of the component form
            for (std::size_t i = 0; i < n; ++i)
                a[i] = -(t.mdot / t.m) * s.v[i] +
                       0.5 * (t.dm_over_r * t.pos[i] / t.m) * t.sumv2 -
                       t.gradV[i] / m0m;
            return a;
        case EomForm::El2Mdot:
            for (std::size_t i = 0; i < n; ++i)
                a[i] = -(t.mdot / (2.0 * t.m)) * s.v[i] - t.gradV[i] / m0m;
            return a;
        case EomForm::El2Radial:
        case EomForm::NewtonParallel:
            for (std::size_t i = 0; i < n; ++i)
                a[i] = -(t.dm_over_r / (2.0 * t.m)) * t.sumv2 * t.pos[i] -
                       t.gradV[i] / m0m;
            return a;
        case EomForm::El1: {
            if (model.dim != 1)
                throw std::invalid_argument(
                    "acceleration: El1 with a common-mass model is only "
                    "defined in one dimension");
            // mdot_1 = m'(x_1) v_1; common and per-axis masses coincide
            a[0] = -(t.mdot / (2.0 * t.m)) * s.v[0] - t.gradV[0] / m0m;
            return a;
        }
    }
    return a;
}

/// Left-hand side of the chosen equation with the acceleration substituted;
/// the zero vector iff accel solves it. The Newtonian forms are reported in
/// their native (mass-weighted) scaling.
inline Vec el_residual(const OscillatorModel& model, EomForm form,
                       const PhaseState& s, const Vec& accel) {
    const auto t = detail::common_terms(model, s);
    const std::size_t n = s.x.size();
    const double m0m = model.m0 * t.m;
    Vec r(n, 0.0);
    switch (form) {
        case EomForm::El2Direct:
            for (std::size_t i = 0; i < n; ++i)
                r[i] = accel[i] + (t.mdot / t.m) * s.v[i] -
                       0.5 * (t.dm_over_r * t.pos[i] / t.m) * t.sumv2 +
                       t.gradV[i] / m0m;
            return r;
        case EomForm::El2Mdot:
            for (std::size_t i = 0; i < n; ++i)
                r[i] = accel[i] + (t.mdot / (2.0 * t.m)) * s.v[i] +
                       t.gradV[i] / m0m;
            return r;
        case EomForm::El2Radial:
            for (std::size_t i = 0; i < n; ++i)
                r[i] = accel[i] +
                       (t.dm_over_r / (2.0 * t.m)) * t.sumv2 * t.pos[i] +
                       t.gradV[i] / m0m;
            return r;
        case EomForm::NewtonFull: {
            const double pv = dot(t.pos, s.v);
            for (std::size_t i = 0; i < n; ++i)
                r[i] = model.m0 * (t.m * accel[i] +
                                   t.dm_over_r * pv * s.v[i] -
                                   0.5 * t.dm_over_r * t.sumv2 * t.pos[i]) +
                       t.gradV[i];
            return r;
        }
        case EomForm::NewtonParallel:
            for (std::size_t i = 0; i < n; ++i)
                r[i] = model.m0 * (t.m * accel[i] +
                                   0.5 * t.dm_over_r * t.sumv2 * t.pos[i]) +
                       t.gradV[i];
            return r;
        case EomForm::El1:
            if (model.dim != 1)
                throw std::invalid_argument(
                    "el_residual: El1 with a common-mass model is only "
                    "defined in one dimension");
            r[0] = accel[0] + (t.mdot / (2.0 * t.m)) * s.v[0] +
                   t.gradV[0] / m0m;
            return r;
    }
    return r;
}

/// Newtonian vector equation evaluated with a := accel:
///   m0 [ m a + (dm/dr) v (p.v)/|p| - (1/2)(dm/dr) p (v.v)/|p| ] + grad V.
/// No collinearity is assumed.
inline Vec newtonian_vector_residual(const OscillatorModel& model,
                                     const PhaseState& s, const Vec& accel) {
    return el_residual(model, EomForm::NewtonFull, s, accel);
}

/// Per-axis mass functions m_i(x_i) and their derivatives, one pair per
/// dimension, for the separable-mass Lagrangian.
struct PerAxisMassSpec {
    std::vector<std::function<double(double)>> m;
    std::vector<std::function<double(double)>> dm;
};

/// Decoupled per-axis accelerations
///   x_i'' = -(m_i'(x_i) x_i'^2)/(2 m_i) - (d_i V)/m_i
/// with mdot_i = m_i'(x_i) x_i'.
inline Vec el1_acceleration(const PerAxisMassSpec& spec,
                            const std::function<Vec(const Vec&)>& potential_grad,
                            const PhaseState& s) {
    const std::size_t n = s.x.size();
    if (spec.m.size() != n || spec.dm.size() != n)
        throw std::invalid_argument("el1_acceleration: spec dimension mismatch");
    const Vec grad = potential_grad(s.x);
    Vec a(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const double mi = spec.m[i](s.x[i]);
        if (std::abs(mi) < kSingularMassEps)
            throw SingularMassError("el1_acceleration: |m_i| < 1e-14");
        const double dmi = spec.dm[i](s.x[i]);
        a[i] = -(dmi * s.v[i] * s.v[i]) / (2.0 * mi) - grad[i] / mi;
    }
    return a;
}

/// Total energy E = (1/2) m0 m sum v^2 + V.
inline double total_energy(const OscillatorModel& model, const PhaseState& s) {
    const double m = profiles::mass(model.profile, s.x);
    return 0.5 * model.m0 * m * dot(s.v, s.v) + profiles::potential(model, s.x);
}

}  // namespace pdmosc::dynamics
