// Core domain types for n-dimensional position-dependent-mass (PDM)
// oscillator models: mass-deformation profiles, oscillator models, phase
// states, trajectories, and verification reports.
#pragma once

#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pdmosc {

using Vec = std::vector<double>;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Evaluation outside the mass profile's domain (singular radius, r=0 with a
/// negative power-law exponent, ...).
struct DomainError : Error {
    using Error::Error;
};

/// Mass multiplier too close to zero for the equations of motion.
struct SingularMassError : DomainError {
    using DomainError::DomainError;
};

/// A model or orbit parameter combination violates a structural constraint.
struct ConstraintError : Error {
    using Error::Error;
};

/// Fractional-power closed forms evaluated where the base cosine is <= 0.
struct BranchDomainError : DomainError {
    using DomainError::DomainError;
};

struct NonMonotoneTauError : Error {
    using Error::Error;
};

struct FitDivergedError : Error {
    using Error::Error;
};

struct StepLimitError : Error {
    using Error::Error;
};

/// Initial state fails the collinearity gate of a reduced equation form.
struct CollinearityError : Error {
    using Error::Error;
};

/// A transformation was requested outside its validity regime.
struct ValidityError : Error {
    using Error::Error;
};

struct InsufficientCrossingsError : Error {
    using Error::Error;
};

// ---------------------------------------------------------------------------
// Numeric conventions
// ---------------------------------------------------------------------------

/// States with collinearity defect below this are treated as collinear.
inline constexpr double kCollinearTol = 1e-12;

/// Collinearity gate applied by integrators and mappings to input states.
inline constexpr double kCollinearGateTol = 1e-10;

/// |m| below this raises SingularMassError in the equations of motion.
inline constexpr double kSingularMassEps = 1e-14;

/// Slack before the singular radius of the 1 - lambda r^2 branch.
inline constexpr double kMinusBranchSlack = 1e-12;

// ---------------------------------------------------------------------------
// Vector helpers
// ---------------------------------------------------------------------------

inline double dot(const Vec& a, const Vec& b) {
    double s = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
    return s;
}

inline double norm(const Vec& a) { return std::sqrt(dot(a, a)); }

/// Euclidean radius r = sqrt(sum x_j^2).
inline double radius(const Vec& x) {
    if (x.empty()) throw std::invalid_argument("radius: empty vector");
    return norm(x);
}

/// 1 - (x.v)^2 / (|x|^2 |v|^2), in [0, 1]; 0 iff the vectors are parallel.
/// A zero vector counts as parallel to everything (turning points pass
/// through v = 0), so the defect is 0 by convention.
inline double collinearity_defect(const Vec& x, const Vec& v) {
    if (x.size() != v.size())
        throw std::invalid_argument("collinearity_defect: dimension mismatch");
    const double xx = dot(x, x);
    const double vv = dot(v, v);
    if (xx == 0.0 || vv == 0.0) return 0.0;
    const double xv = dot(x, v);
    double d = 1.0 - (xv * xv) / (xx * vv);
    if (d < 0.0) d = 0.0;
    if (d > 1.0) d = 1.0;
    return d;
}

// ---------------------------------------------------------------------------
// Mass-deformation profiles
// ---------------------------------------------------------------------------

enum class ProfileKind {
    MathewsLakshmanan,  // m = 1 / (1 +- lambda r^2)
    PowerLaw,           // m = k r^(2 upsilon)
    ShiftedMl,          // m = 1 / (1 +- lambda y^2), y = |x + shift|
};

enum class SignBranch { Plus, Minus };

inline double branch_sign(SignBranch s) {
    return s == SignBranch::Plus ? 1.0 : -1.0;
}

struct PdmProfile {
    ProfileKind kind = ProfileKind::MathewsLakshmanan;
    double lambda = 0.0;               // deformation strength, >= 0
    SignBranch sign = SignBranch::Plus;
    double k = 1.0;                    // power-law prefactor, != 0
    double upsilon = 0.0;              // power-law exponent
    Vec shift;                         // ShiftedMl displacement, else empty
};

inline PdmProfile mathews_lakshmanan(double lambda, SignBranch sign) {
    if (lambda < 0.0)
        throw ConstraintError("mathews_lakshmanan: lambda must be >= 0");
    PdmProfile p;
    p.kind = ProfileKind::MathewsLakshmanan;
    p.lambda = lambda;
    p.sign = sign;
    return p;
}

inline PdmProfile power_law(double k, double upsilon) {
    if (k == 0.0) throw ConstraintError("power_law: k must be nonzero");
    PdmProfile p;
    p.kind = ProfileKind::PowerLaw;
    p.k = k;
    p.upsilon = upsilon;
    return p;
}

inline PdmProfile shifted_ml(double lambda, SignBranch sign, Vec shift) {
    if (lambda < 0.0)
        throw ConstraintError("shifted_ml: lambda must be >= 0");
    if (shift.empty())
        throw ConstraintError("shifted_ml: shift vector must have dimension n");
    PdmProfile p;
    p.kind = ProfileKind::ShiftedMl;
    p.lambda = lambda;
    p.sign = sign;
    p.shift = std::move(shift);
    return p;
}

// ---------------------------------------------------------------------------
// Oscillator models
// ---------------------------------------------------------------------------

/// Substitution family linking the PDM system to the constant-mass reference
/// oscillator:
///   TypeA: q = sqrt(m) * r
///   TypeB: q = sqrt(m) * zeta, with zeta a constant vector
///   TypeC: q = sqrt(m(y)) * y, with y = x + shift (shifted family)
enum class Family { TypeA, TypeB, TypeC };

struct OscillatorModel {
    PdmProfile profile;
    Family family = Family::TypeA;
    std::size_t dim = 1;
    double omega0 = 1.0;  // reference angular frequency
    double m0 = 1.0;      // constant mass scale
    Vec zeta;             // TypeB constant vector (empty otherwise)

    // TypeB only: formal squared magnitude of zeta. Normally |zeta|^2, but
    // the power-law type-II parametrization requires a negative value that
    // no real vector realizes; it is carried here as bookkeeping.
    double zeta_sq_formal = std::numeric_limits<double>::quiet_NaN();

    double zeta_norm_sq() const {
        if (!zeta.empty()) return dot(zeta, zeta);
        return zeta_sq_formal;
    }

    /// TypeB with a negative formal zeta^2 has no real time-scale factor.
    bool has_real_time_scale() const {
        return family != Family::TypeB || zeta_norm_sq() > 0.0;
    }
};

inline void validate(const OscillatorModel& m) {
    if (m.dim < 1) throw ConstraintError("model: dim must be >= 1");
    if (!(m.omega0 > 0.0)) throw ConstraintError("model: omega0 must be > 0");
    if (!(m.m0 > 0.0)) throw ConstraintError("model: m0 must be > 0");
    const bool shifted = m.profile.kind == ProfileKind::ShiftedMl;
    if ((m.family == Family::TypeC) != shifted)
        throw ConstraintError(
            "model: the shifted profile pairs with TypeC and only TypeC");
    if (shifted && m.profile.shift.size() != m.dim)
        throw ConstraintError("model: shift dimension must equal dim");
    if (m.family == Family::TypeB) {
        if (!m.zeta.empty() && m.zeta.size() != m.dim)
            throw ConstraintError("model: zeta dimension must equal dim");
        const double zs = m.zeta_norm_sq();
        if (std::isnan(zs) || zs == 0.0)
            throw ConstraintError(
                "model: TypeB requires a nonzero zeta vector or a nonzero "
                "formal zeta^2");
    } else if (!m.zeta.empty()) {
        throw ConstraintError("model: zeta is meaningful only for TypeB");
    }
}

// ---------------------------------------------------------------------------
// States, trajectories, reports
// ---------------------------------------------------------------------------

struct PhaseState {
    double t = 0.0;
    Vec x;
    Vec v;
};

struct TrajectorySample {
    PhaseState state;
    double tau = 0.0;     // re-scaled time accumulated via dtau = f dt
    double energy = 0.0;
};

struct Trajectory {
    OscillatorModel model;
    std::vector<TrajectorySample> samples;
};

struct VerificationReport {
    std::string check_name;
    double max_residual = 0.0;
    double rms_residual = 0.0;
    double tolerance = 0.0;
    bool passed = false;
    std::string notes;
};

inline VerificationReport make_report(std::string name, double max_residual,
                                      double rms_residual, double tolerance,
                                      std::string notes = {}) {
    VerificationReport r;
    r.check_name = std::move(name);
    r.max_residual = max_residual;
    r.rms_residual = rms_residual;
    r.tolerance = tolerance;
    r.passed = max_residual <= tolerance;
    r.notes = std::move(notes);
    return r;
}

}  // namespace pdmosc
