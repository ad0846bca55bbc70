#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "pdmosc/closed_form.hpp"
#include "pdmosc/integrate.hpp"
#include "pdmosc/transforms.hpp"

using namespace pdmosc;
using namespace pdmosc::transforms;
using pdmosc::dynamics::EomForm;

namespace {

OscillatorModel ml1_model(double lambda, SignBranch sign, std::size_t dim,
                          double omega0 = 1.0) {
    OscillatorModel m;
    m.profile = mathews_lakshmanan(lambda, sign);
    m.family = Family::TypeA;
    m.dim = dim;
    m.omega0 = omega0;
    return m;
}

Trajectory integrate_orbit(const OscillatorModel& model,
                           const closed_form::ClosedFormOrbit& orbit,
                           double periods, double steps_per_period) {
    const double T = 2.0 * M_PI / orbit.Omega;
    ode::IntegratorConfig cfg;
    cfg.method = ode::Method::Rk4Fixed;
    cfg.dt = T / steps_per_period;
    cfg.t_end = periods * T;
    return ode::integrate(model, EomForm::El2Direct,
                          closed_form::evaluate_orbit(orbit, 0.0), cfg);
}

ReferenceTrajectory synthetic_cosine(double B, double omega, double phase,
                                     double span, std::size_t count) {
    ReferenceTrajectory ref;
    for (std::size_t k = 0; k < count; ++k) {
        const double tau = span * static_cast<double>(k) /
                           static_cast<double>(count - 1);
        ref.tau.push_back(tau);
        ref.q.push_back({B * std::cos(omega * tau + phase)});
        ref.qtilde.push_back({-B * omega * std::sin(omega * tau + phase)});
    }
    return ref;
}

}  // namespace

TEST_CASE("map_point") {
    SECTION("identity in the constant-mass limit") {
        const auto model = ml1_model(0.0, SignBranch::Plus, 2);
        const auto [q, qt] = map_point(model, {0.0, {0.3, -0.1}, {0.7, 0.2}});
        CHECK(q[0] == 0.3);
        CHECK(q[1] == -0.1);
        CHECK(qt[0] == 0.7);
    }

    SECTION("ML map scales by sqrt(m)") {
        const auto model = ml1_model(1.0, SignBranch::Plus, 2);
        const auto [q, qt] = map_point(model, {0.0, {1.0, 0.0}, {0.0, 0.0}});
        CHECK(q[0] == Catch::Approx(0.7071067811865476).margin(1e-15));
        CHECK(q[1] == 0.0);
        CHECK(qt[0] == 0.0);
    }

    SECTION("shifted map vanishes at x = -shift") {
        OscillatorModel m;
        m.profile = shifted_ml(1.0, SignBranch::Plus, {1.0, 0.0});
        m.family = Family::TypeC;
        m.dim = 2;
        const auto [q, qt] = map_point(m, {0.0, {-1.0, 0.0}, {0.4, 0.0}});
        CHECK(q[0] == 0.0);
        CHECK(q[1] == 0.0);
        CHECK(qt[0] == Catch::Approx(0.4));
    }

    SECTION("TypeB gate rejects non-collinear states") {
        OscillatorModel m;
        m.profile = mathews_lakshmanan(1.0, SignBranch::Minus);
        m.family = Family::TypeB;
        m.dim = 2;
        m.zeta = {1.0, 0.0};
        CHECK_THROWS_AS(map_point(m, {0.0, {0.3, 0.4}, {0.3, 0.0}}),
                        ValidityError);
        CHECK_THROWS_AS(map_point(m, {0.0, {0.3, 0.0}, {0.3, 0.4}}),
                        ValidityError);
        CHECK_NOTHROW(map_point(m, {0.0, {0.3, 0.0}, {-0.2, 0.0}}));
    }

    SECTION("qtilde = v sqrt(m) for every family") {
        const auto model = ml1_model(0.7, SignBranch::Plus, 3);
        const PhaseState s{0.0, {0.4, -0.1, 0.2}, {1.0, 0.5, -0.3}};
        const auto [q, qt] = map_point(model, s);
        const double sm = std::sqrt(profiles::mass(model.profile, s.x));
        for (std::size_t i = 0; i < 3; ++i)
            CHECK(std::abs(qt[i] - s.v[i] * sm) <= 1e-12);
    }
}

TEST_CASE("accumulate_tau") {
    SECTION("f == 1 gives tau == t") {
        const auto model = ml1_model(0.0, SignBranch::Plus, 1);
        const auto orbit = closed_form::build_orbit(model, {1.0}, 0.0);
        const auto traj = integrate_orbit(model, orbit, 1.0, 200.0);
        const auto tau = accumulate_tau(model, traj);
        for (std::size_t k = 0; k < tau.size(); ++k)
            CHECK(std::abs(tau[k] - traj.samples[k].state.t) <= 1e-12);
    }

    SECTION("constant f = 1 + upsilon gives tau = 3 t for upsilon = 2") {
        OscillatorModel model;
        model.profile = power_law(1.0, 2.0);
        model.family = Family::TypeA;
        model.dim = 1;
        const auto orbit = closed_form::build_orbit(model, {1.0}, 0.0);
        // stay inside the principal arc, clear of the collapse
        const double T = 2.0 * M_PI / orbit.Omega;
        ode::IntegratorConfig cfg;
        cfg.dt = T / 1000.0;
        cfg.t_end = 0.2 * T;
        const auto traj =
            ode::integrate(model, EomForm::El2Direct,
                           closed_form::evaluate_orbit(orbit, 0.0), cfg);
        const auto tau = accumulate_tau(model, traj);
        for (std::size_t k = 0; k < tau.size(); ++k) {
            CHECK(std::abs(tau[k] - 3.0 * traj.samples[k].state.t) <= 1e-10);
            CHECK(std::abs(traj.samples[k].tau - 3.0 * traj.samples[k].state.t) <=
                  1e-10);
        }
    }

    SECTION("re-integration agrees with the integrator's augmented tau") {
        const auto model = ml1_model(1.0, SignBranch::Plus, 2);
        const auto orbit = closed_form::build_orbit(model, {1.0, 0.4}, 0.0);
        const auto traj = integrate_orbit(model, orbit, 2.0, 500.0);
        const auto tau = accumulate_tau(model, traj);
        for (std::size_t k = 0; k < tau.size(); ++k)
            CHECK(std::abs(tau[k] - traj.samples[k].tau) <= 1e-9);
    }
}

TEST_CASE("sho_residual") {
    SECTION("exact cosine samples on a fine grid") {
        const auto ref = synthetic_cosine(1.3, 2.0, 0.4, 10.0, 2000);
        const auto rep = sho_residual(ref, 2.0, 1e-4);
        CHECK(rep.passed);
        // second-order truncation: O(dtau^2)
        const double dtau = 10.0 / 1999.0;
        CHECK(rep.rms_residual <= 10.0 * dtau * dtau);
    }

    SECTION("constant q is flagged as a non-solution") {
        ReferenceTrajectory ref;
        for (int k = 0; k < 10; ++k) {
            ref.tau.push_back(0.1 * k);
            ref.q.push_back({1.0});
            ref.qtilde.push_back({0.0});
        }
        const auto rep = sho_residual(ref, 1.0, 1e-6);
        CHECK_FALSE(rep.passed);
        CHECK(rep.max_residual == Catch::Approx(1.0));  // omega0^2 * q
    }

    SECTION("non-monotone tau raises") {
        ReferenceTrajectory ref;
        for (int k = 0; k < 10; ++k) {
            ref.tau.push_back(std::sin(0.7 * k));
            ref.q.push_back({1.0});
            ref.qtilde.push_back({0.0});
        }
        CHECK_THROWS_AS(sho_residual(ref, 1.0, 1e-6), NonMonotoneTauError);
    }

    SECTION("too few samples raises") {
        ReferenceTrajectory ref;
        ref.tau = {0.0, 0.1};
        ref.q = {{1.0}, {1.0}};
        ref.qtilde = {{0.0}, {0.0}};
        CHECK_THROWS_AS(sho_residual(ref, 1.0, 1e-6), std::invalid_argument);
    }

    SECTION("mapped ML1 trajectory satisfies the reference oscillator") {
        const auto model = ml1_model(1.0, SignBranch::Plus, 3);
        const auto orbit =
            closed_form::build_orbit(model, {1.0, 0.5, 0.25}, 0.0);
        const auto traj = integrate_orbit(model, orbit, 10.0, 2000.0);
        const auto ref = to_reference(model, traj);
        const auto rep = sho_residual(ref, model.omega0, 1e-4);
        CHECK(rep.rms_residual <= 1e-4);
    }
}

TEST_CASE("cosine_fit") {
    SECTION("recovers its own model class") {
        const auto ref = synthetic_cosine(2.0, 3.0, 0.5, 12.0, 400);
        const auto fit = cosine_fit(ref);
        CHECK(std::abs(fit.amplitudes[0] - 2.0) <= 1e-8);
        CHECK(std::abs(fit.omega - 3.0) <= 1e-8);
        CHECK(std::abs(fit.phase - 0.5) <= 1e-8);
        CHECK(fit.rms <= 1e-10);
    }

    SECTION("zero signal diverges") {
        ReferenceTrajectory ref;
        for (int k = 0; k < 50; ++k) {
            ref.tau.push_back(0.1 * k);
            ref.q.push_back({0.0});
            ref.qtilde.push_back({0.0});
        }
        CHECK_THROWS_AS(cosine_fit(ref), FitDivergedError);
    }

    SECTION("mapped ML1 orbit oscillates at omega0") {
        const auto model = ml1_model(1.0, SignBranch::Plus, 3);
        const auto orbit =
            closed_form::build_orbit(model, {1.0, 0.5, 0.25}, 0.0);
        const auto traj = integrate_orbit(model, orbit, 10.0, 2000.0);
        const auto ref = to_reference(model, traj);
        const auto fit = cosine_fit(ref);
        CHECK(std::abs(fit.omega - model.omega0) <= 1e-6 * model.omega0);
    }

    SECTION("quarter-arc data still identifies the frequency") {
        const auto ref = synthetic_cosine(1.0, 2.0, 0.0, 0.7, 200);
        const auto fit = cosine_fit(ref);
        CHECK(std::abs(fit.omega - 2.0) <= 1e-6);
    }
}

TEST_CASE("verify_f_consistency") {
    SECTION("identity limit is exact") {
        const auto model = ml1_model(0.0, SignBranch::Plus, 1);
        const auto orbit = closed_form::build_orbit(model, {1.0}, 0.0);
        const auto traj = integrate_orbit(model, orbit, 1.0, 500.0);
        const auto rep = verify_f_consistency(model, traj, 1e-4);
        CHECK(rep.passed);
    }

    SECTION("ML1 orbit within the finite-difference truncation bound") {
        const auto model = ml1_model(1.0, SignBranch::Plus, 2);
        const auto orbit = closed_form::build_orbit(model, {1.0, 0.4}, 0.0);
        const auto traj = integrate_orbit(model, orbit, 2.0, 2000.0);
        const double dt =
            traj.samples[1].state.t - traj.samples[0].state.t;
        const auto rep = verify_f_consistency(model, traj, 10.0 * dt * dt);
        CHECK(rep.passed);
    }

    SECTION("TypeB holds in the co-directional regime") {
        const double lambda = 1.0;
        OscillatorModel model;
        model.profile = mathews_lakshmanan(lambda, SignBranch::Minus);
        model.family = Family::TypeB;
        model.dim = 2;
        model.zeta = {1.0 / std::sqrt(2.0), 1.0 / std::sqrt(2.0)};
        const auto orbit = closed_form::build_orbit(model, {0.4, 0.4}, 0.0);
        // analytic sampling across a window inside the co-directional arc
        Trajectory traj;
        traj.model = model;
        const double T = 2.0 * M_PI / orbit.Omega;
        for (int k = 0; k <= 2000; ++k) {
            const double t = -0.2 * T + 0.4 * T * k / 2000.0;
            TrajectorySample s;
            s.state = closed_form::evaluate_orbit(orbit, t);
            s.tau = 0.0;
            s.energy = 0.0;
            traj.samples.push_back(std::move(s));
        }
        const double dt = 0.4 * T / 2000.0;
        const auto rep = verify_f_consistency(model, traj, 50.0 * dt * dt);
        CHECK(rep.passed);
        CHECK(rep.notes.find("skipped") == std::string::npos);
    }
}
