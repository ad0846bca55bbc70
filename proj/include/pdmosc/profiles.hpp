// Mass multiplier m, its radial derivative, the time-scale factor f, the
// space-scale factor g = m f^2, and the deformed oscillator potential for
// each (profile, substitution family) pair.
#pragma once

#include <cmath>
#include <string>

#include "pdmosc/core.hpp"

namespace pdmosc::profiles {

/// Radius argument fed to the profile: |x| for the unshifted kinds, |x + shift|
/// for the shifted one.
inline double profile_radius(const PdmProfile& p, const Vec& x) {
    if (p.kind != ProfileKind::ShiftedMl) return norm(x);
    if (p.shift.size() != x.size())
        throw std::invalid_argument("profile_radius: shift/x dimension mismatch");
    double s = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double y = x[i] + p.shift[i];
        s += y * y;
    }
    return std::sqrt(s);
}

/// Shifted position y = x + shift (just x for unshifted profiles).
inline Vec shifted_position(const PdmProfile& p, const Vec& x) {
    if (p.kind != ProfileKind::ShiftedMl) return x;
    Vec y(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) y[i] = x[i] + p.shift[i];
    return y;
}

inline void check_domain(const PdmProfile& p, double r) {
    switch (p.kind) {
        case ProfileKind::MathewsLakshmanan:
        case ProfileKind::ShiftedMl:
            if (p.sign == SignBranch::Minus && p.lambda > 0.0 &&
                r * r >= 1.0 / p.lambda - kMinusBranchSlack)
                throw DomainError(
                    "mass singularity: r^2 >= 1/lambda on the minus branch "
                    "(r = " + std::to_string(r) + ")");
            return;
        case ProfileKind::PowerLaw:
            if (p.upsilon < 0.0 && r == 0.0)
                throw DomainError(
                    "power-law mass diverges at r = 0 for negative exponents");
            return;
    }
}

/// m(r): 1/(1 +- lambda r^2) or k r^(2 upsilon).
inline double mass_at(const PdmProfile& p, double r) {
    check_domain(p, r);
    switch (p.kind) {
        case ProfileKind::MathewsLakshmanan:
        case ProfileKind::ShiftedMl:
            return 1.0 / (1.0 + branch_sign(p.sign) * p.lambda * r * r);
        case ProfileKind::PowerLaw:
            return p.k * std::pow(r, 2.0 * p.upsilon);
    }
    return 0.0;  // unreachable
}

/// dm/dr: -+ 2 lambda r / (1 +- lambda r^2)^2 or 2 upsilon k r^(2 upsilon - 1).
inline double mass_radial_derivative_at(const PdmProfile& p, double r) {
    check_domain(p, r);
    switch (p.kind) {
        case ProfileKind::MathewsLakshmanan:
        case ProfileKind::ShiftedMl: {
            const double d = 1.0 + branch_sign(p.sign) * p.lambda * r * r;
            return -branch_sign(p.sign) * 2.0 * p.lambda * r / (d * d);
        }
        case ProfileKind::PowerLaw:
            if (p.upsilon == 0.0) return 0.0;
            return 2.0 * p.upsilon * p.k * std::pow(r, 2.0 * p.upsilon - 1.0);
    }
    return 0.0;
}

/// (dm/dr)/r, analytic so the r -> 0 limit stays finite where it exists.
inline double dm_dr_over_r_at(const PdmProfile& p, double r) {
    check_domain(p, r);
    switch (p.kind) {
        case ProfileKind::MathewsLakshmanan:
        case ProfileKind::ShiftedMl: {
            const double d = 1.0 + branch_sign(p.sign) * p.lambda * r * r;
            return -branch_sign(p.sign) * 2.0 * p.lambda / (d * d);
        }
        case ProfileKind::PowerLaw:
            if (p.upsilon == 0.0) return 0.0;
            return 2.0 * p.upsilon * p.k * std::pow(r, 2.0 * p.upsilon - 2.0);
    }
    return 0.0;
}

/// r (dm/dr) / (2m), the dimensionless log-derivative entering f. Reduced
/// analytically per profile so power-law models stay exact at r = 0.
inline double r_dm_dr_over_2m_at(const PdmProfile& p, double r) {
    check_domain(p, r);
    switch (p.kind) {
        case ProfileKind::MathewsLakshmanan:
        case ProfileKind::ShiftedMl: {
            const double s = branch_sign(p.sign);
            return -s * p.lambda * r * r / (1.0 + s * p.lambda * r * r);
        }
        case ProfileKind::PowerLaw:
            return p.upsilon;
    }
    return 0.0;
}

/// (dm/dr) / (2m).
inline double dm_dr_over_2m_at(const PdmProfile& p, double r) {
    check_domain(p, r);
    switch (p.kind) {
        case ProfileKind::MathewsLakshmanan:
        case ProfileKind::ShiftedMl: {
            const double s = branch_sign(p.sign);
            return -s * p.lambda * r / (1.0 + s * p.lambda * r * r);
        }
        case ProfileKind::PowerLaw:
            if (r == 0.0)
                throw DomainError(
                    "power-law dm/(2m) diverges at r = 0");
            return p.upsilon / r;
    }
    return 0.0;
}

inline double mass(const PdmProfile& p, const Vec& x) {
    return mass_at(p, profile_radius(p, x));
}

inline double mass_radial_derivative(const PdmProfile& p, const Vec& x) {
    return mass_radial_derivative_at(p, profile_radius(p, x));
}

/// Time-scale factor of dtau = f dt:
///   TypeA: f = 1 + r m'/(2m)
///   TypeB: f = zeta m'/(2m), zeta = |zeta vector|
///   TypeC: f = 1 + y m'(y)/(2m(y))
inline double time_scale_f(const OscillatorModel& model, const Vec& x) {
    const double r = profile_radius(model.profile, x);
    switch (model.family) {
        case Family::TypeA:
        case Family::TypeC:
            return 1.0 + r_dm_dr_over_2m_at(model.profile, r);
        case Family::TypeB: {
            const double zs = model.zeta_norm_sq();
            if (!(zs > 0.0))
                throw ConstraintError(
                    "time_scale_f: TypeB with formal zeta^2 <= 0 has no real "
                    "time-scale factor");
            return std::sqrt(zs) * dm_dr_over_2m_at(model.profile, r);
        }
    }
    return 1.0;
}

/// Space-scale factor g = m f^2.
inline double space_scale_g(const OscillatorModel& model, const Vec& x) {
    const double m = mass(model.profile, x);
    const double f = time_scale_f(model, x);
    return m * f * f;
}

/// Deformed oscillator potential (includes the m0 scale):
///   TypeA: V = (1/2) m0 m omega0^2 sum x^2
///   TypeB: V = (1/2) m0 m omega0^2 zeta^2
///   TypeC: V = (1/2) m0 m(y) omega0^2 sum y^2
inline double potential(const OscillatorModel& model, const Vec& x) {
    const double r = profile_radius(model.profile, x);
    const double m = mass_at(model.profile, r);
    const double w2 = model.omega0 * model.omega0;
    switch (model.family) {
        case Family::TypeA:
        case Family::TypeC:
            return 0.5 * model.m0 * m * w2 * r * r;
        case Family::TypeB:
            return 0.5 * model.m0 * m * w2 * model.zeta_norm_sq();
    }
    return 0.0;
}

/// Analytic gradient of the family potential. For TypeA/TypeC this collapses
/// to m0 omega0^2 m f x (resp. ... m f y), for TypeB to
/// (1/2) m0 omega0^2 zeta^2 (m'/r) x.
inline Vec potential_gradient(const OscillatorModel& model, const Vec& x) {
    const double w2 = model.omega0 * model.omega0;
    Vec g(x.size(), 0.0);
    switch (model.family) {
        case Family::TypeA:
        case Family::TypeC: {
            const Vec pos = shifted_position(model.profile, x);
            const double r = norm(pos);
            const double m = mass_at(model.profile, r);
            const double f = 1.0 + r_dm_dr_over_2m_at(model.profile, r);
            const double c = model.m0 * w2 * m * f;
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = c * pos[i];
            return g;
        }
        case Family::TypeB: {
            const double r = norm(x);
            const double c = 0.5 * model.m0 * w2 * model.zeta_norm_sq() *
                             dm_dr_over_r_at(model.profile, r);
            for (std::size_t i = 0; i < x.size(); ++i) g[i] = c * x[i];
            return g;
        }
    }
    return g;
}

struct ProfileEvaluation {
    double m = 0.0;      // mass multiplier
    double dm_dr = 0.0;  // radial derivative
    double f = 0.0;      // time-scale factor
    double g = 0.0;      // space-scale factor, m f^2
    double V = 0.0;      // potential energy
};

inline ProfileEvaluation evaluate_profile(const OscillatorModel& model,
                                          const Vec& x) {
    ProfileEvaluation e;
    const double r = profile_radius(model.profile, x);
    e.m = mass_at(model.profile, r);
    e.dm_dr = mass_radial_derivative_at(model.profile, r);
    e.f = time_scale_f(model, x);
    e.g = e.m * e.f * e.f;
    e.V = potential(model, x);
    return e;
}

}  // namespace pdmosc::profiles
