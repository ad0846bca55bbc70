#include <catch2/catch_amalgamated.hpp>

#include <random>

#include "pdmosc/profiles.hpp"

using namespace pdmosc;
using namespace pdmosc::profiles;

namespace {

OscillatorModel type_a(PdmProfile p, std::size_t dim = 2, double omega0 = 1.0) {
    OscillatorModel m;
    m.profile = std::move(p);
    m.family = Family::TypeA;
    m.dim = dim;
    m.omega0 = omega0;
    return m;
}

}  // namespace

TEST_CASE("mass values") {
    CHECK(mass(mathews_lakshmanan(0.1, SignBranch::Plus), {0.0, 0.0}) == 1.0);
    CHECK(mass(power_law(2.0, 1.0), {2.0, 0.0}) == 8.0);
    CHECK(mass(shifted_ml(1.0, SignBranch::Plus, {1.0, 0.0}), {0.0, 0.0}) ==
          0.5);
}

TEST_CASE("mass radial derivative values") {
    CHECK(mass_radial_derivative_at(mathews_lakshmanan(0.1, SignBranch::Plus),
                                    0.0) == 0.0);
    CHECK(mass_radial_derivative_at(power_law(1.0, 1.0), 3.0) == 6.0);
    CHECK(mass_radial_derivative_at(mathews_lakshmanan(1.0, SignBranch::Plus),
                                    1.0) == -0.5);
}

TEST_CASE("mass domain guards") {
    const auto minus = mathews_lakshmanan(1.0, SignBranch::Minus);
    CHECK_THROWS_AS(mass_at(minus, 1.0), DomainError);
    CHECK_THROWS_AS(mass_at(minus, 2.0), DomainError);
    CHECK(mass_at(minus, 0.5) == Catch::Approx(1.0 / 0.75));

    CHECK_THROWS_AS(mass_at(power_law(1.0, -1.0), 0.0), DomainError);
    // m = 0 at the origin for positive exponents is fine here; the dynamics
    // raise the division error
    CHECK(mass_at(power_law(1.0, 1.0), 0.0) == 0.0);
}

TEST_CASE("radial derivative matches central finite differences") {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> rdist(0.05, 2.0);
    const PdmProfile profiles[] = {
        mathews_lakshmanan(0.5, SignBranch::Plus),
        mathews_lakshmanan(0.2, SignBranch::Minus),
        power_law(1.5, 1.0),
        power_law(0.5, 2.0),
        power_law(2.0, -0.5),
        shifted_ml(0.7, SignBranch::Plus, {0.5}),
    };
    for (const auto& p : profiles) {
        for (int it = 0; it < 200; ++it) {
            double r = rdist(rng);
            if (p.kind != ProfileKind::PowerLaw && p.sign == SignBranch::Minus)
                r = std::min(r, 0.9 / std::sqrt(p.lambda));
            const double h = 1e-6 * std::max(1.0, r);
            const double fd =
                (mass_at(p, r + h) - mass_at(p, r - h)) / (2.0 * h);
            const double an = mass_radial_derivative_at(p, r);
            CHECK(std::abs(fd - an) <=
                  1e-6 * std::max(1.0, std::abs(an)));
        }
    }
}

TEST_CASE("time-scale factor specializations") {
    // power-law: f = 1 + upsilon, independent of position
    const auto pl = type_a(power_law(1.0, 2.0));
    CHECK(time_scale_f(pl, {0.7, -0.3}) == 3.0);
    CHECK(time_scale_f(pl, {2.0, 5.0}) == 3.0);

    // Mathews-Lakshmanan: f = 1/(1 + lambda r^2)
    const auto ml = type_a(mathews_lakshmanan(1.0, SignBranch::Plus));
    CHECK(time_scale_f(ml, {1.0, 0.0}) == Catch::Approx(0.5).margin(1e-15));

    // shifted family: f = m, so f = 1 at y = 0
    OscillatorModel sh;
    sh.profile = shifted_ml(1.0, SignBranch::Plus, {1.0, 0.0});
    sh.family = Family::TypeC;
    sh.dim = 2;
    CHECK(time_scale_f(sh, {-1.0, 0.0}) == 1.0);
}

TEST_CASE("generic f equals the closed-form specialization per family") {
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> rdist(0.05, 1.5);

    SECTION("TypeA Mathews-Lakshmanan, both branches") {
        for (const auto sign : {SignBranch::Plus, SignBranch::Minus}) {
            const double lambda = 0.4;
            const auto m = type_a(mathews_lakshmanan(lambda, sign), 1);
            for (int it = 0; it < 300; ++it) {
                const double r = std::min(rdist(rng), 1.2);
                const double f = time_scale_f(m, {r});
                const double spec =
                    1.0 / (1.0 + branch_sign(sign) * lambda * r * r);
                CHECK(std::abs(f - spec) <= 1e-12 * std::abs(spec));
                // and the unsimplified ratio route
                const double raw = 1.0 +
                                   r * mass_radial_derivative_at(m.profile, r) /
                                       (2.0 * mass_at(m.profile, r));
                CHECK(std::abs(f - raw) <= 1e-12 * std::max(1.0, std::abs(f)));
            }
        }
    }

    SECTION("TypeB Mathews-Lakshmanan: f = -+ lambda r zeta / (1 +- lambda r^2)") {
        for (const auto sign : {SignBranch::Plus, SignBranch::Minus}) {
            const double lambda = 0.4;
            OscillatorModel m;
            m.profile = mathews_lakshmanan(lambda, sign);
            m.family = Family::TypeB;
            m.dim = 1;
            m.zeta = {1.7};
            for (int it = 0; it < 300; ++it) {
                const double r = std::min(rdist(rng), 1.2);
                const double f = time_scale_f(m, {r});
                const double s = branch_sign(sign);
                const double spec =
                    -s * lambda * r * 1.7 / (1.0 + s * lambda * r * r);
                CHECK(std::abs(f - spec) <= 1e-12 * std::max(1.0, std::abs(spec)));
            }
        }
    }
}

TEST_CASE("space-scale factor g = m f^2") {
    CHECK(space_scale_g(type_a(mathews_lakshmanan(0.0, SignBranch::Plus)),
                        {0.3, 0.4}) == 1.0);
    CHECK(space_scale_g(type_a(power_law(1.0, 1.0)), {2.0, 0.0}) ==
          Catch::Approx(16.0));
    CHECK(space_scale_g(type_a(mathews_lakshmanan(1.0, SignBranch::Plus)),
                        {1.0, 0.0}) == Catch::Approx(0.125));

    std::mt19937_64 rng(13);
    std::normal_distribution<double> gauss(0.0, 1.0);
    std::uniform_real_distribution<double> rdist(0.05, 1.2);
    std::vector<OscillatorModel> models = {
        type_a(mathews_lakshmanan(0.8, SignBranch::Plus), 3),
        type_a(mathews_lakshmanan(0.3, SignBranch::Minus), 3),
        type_a(power_law(2.0, 1.0), 3),
        type_a(power_law(0.5, -0.5), 3),
    };
    OscillatorModel b;
    b.profile = mathews_lakshmanan(0.5, SignBranch::Minus);
    b.family = Family::TypeB;
    b.dim = 3;
    b.zeta = {1.0, 1.0, 0.0};
    models.push_back(b);
    OscillatorModel c;
    c.profile = shifted_ml(0.6, SignBranch::Plus, {0.2, -0.1, 0.4});
    c.family = Family::TypeC;
    c.dim = 3;
    models.push_back(c);

    for (const auto& m : models) {
        for (int it = 0; it < 10000 / 6; ++it) {
            Vec x(3);
            for (auto& xi : x) xi = gauss(rng);
            const double nx = norm(x);
            const double want = rdist(rng);
            for (auto& xi : x) xi *= want / (nx > 0 ? nx : 1.0);
            const double g = space_scale_g(m, x);
            const double mf2 = mass(m.profile, x) * time_scale_f(m, x) *
                               time_scale_f(m, x);
            CHECK(std::abs(g - mf2) <= 1e-12 * std::max(1.0, std::abs(g)));
        }
    }
}

TEST_CASE("potential values") {
    CHECK(potential(type_a(mathews_lakshmanan(0.7, SignBranch::Plus)),
                    {0.0, 0.0}) == 0.0);

    OscillatorModel b;
    b.profile = mathews_lakshmanan(1.0, SignBranch::Plus);
    b.family = Family::TypeB;
    b.dim = 2;
    b.zeta = {1.0, 0.0};
    CHECK(potential(b, {1.0, 0.0}) == Catch::Approx(0.25));

    OscillatorModel c;
    c.profile = shifted_ml(1.0, SignBranch::Plus, {1.0, 0.0});
    c.family = Family::TypeC;
    c.dim = 2;
    c.omega0 = 2.0;
    CHECK(potential(c, {-1.0, 0.0}) == 0.0);
}

TEST_CASE("analytic potential gradient matches finite differences") {
    std::mt19937_64 rng(17);
    std::normal_distribution<double> gauss(0.0, 0.5);

    std::vector<OscillatorModel> models = {
        type_a(mathews_lakshmanan(0.8, SignBranch::Plus), 3, 1.3),
        type_a(mathews_lakshmanan(0.3, SignBranch::Minus), 3, 0.7),
        type_a(power_law(1.5, 1.0), 3, 1.0),
        type_a(power_law(1.0, 2.0), 3, 2.0),
    };
    OscillatorModel b;
    b.profile = mathews_lakshmanan(0.5, SignBranch::Plus);
    b.family = Family::TypeB;
    b.dim = 3;
    b.omega0 = 1.1;
    b.zeta = {0.7, -0.2, 0.1};
    models.push_back(b);
    OscillatorModel c;
    c.profile = shifted_ml(0.6, SignBranch::Plus, {0.2, -0.1, 0.4});
    c.family = Family::TypeC;
    c.dim = 3;
    c.m0 = 1.7;
    models.push_back(c);

    for (const auto& m : models) {
        for (int it = 0; it < 100; ++it) {
            Vec x(3);
            for (auto& xi : x) xi = gauss(rng);
            if (norm(x) < 0.05) x[0] += 0.3;
            const Vec g = potential_gradient(m, x);
            for (std::size_t i = 0; i < 3; ++i) {
                const double h = 1e-6 * std::max(1.0, std::abs(x[i]));
                Vec xp = x, xm = x;
                xp[i] += h;
                xm[i] -= h;
                const double fd =
                    (potential(m, xp) - potential(m, xm)) / (2.0 * h);
                CHECK(std::abs(fd - g[i]) <=
                      2e-6 * std::max(1.0, std::abs(g[i])));
            }
        }
    }
}

TEST_CASE("TypeB with formal negative zeta^2 has no real time scale") {
    OscillatorModel m;
    m.profile = power_law(1.0, -1.0);
    m.family = Family::TypeB;
    m.dim = 1;
    m.zeta_sq_formal = -1.0;
    CHECK_THROWS_AS(time_scale_f(m, {1.0}), ConstraintError);
    // the potential stays real: V = (1/2) m omega0^2 zeta^2 with zeta^2 < 0
    CHECK(potential(m, {1.0}) == Catch::Approx(-0.5));
}

TEST_CASE("profile evaluation bundles the pointwise quantities") {
    const auto m = type_a(mathews_lakshmanan(1.0, SignBranch::Plus));
    const auto e = evaluate_profile(m, {1.0, 0.0});
    CHECK(e.m == 0.5);
    CHECK(e.dm_dr == -0.5);
    CHECK(e.f == Catch::Approx(0.5));
    CHECK(e.g == Catch::Approx(0.125));
    CHECK(e.V == Catch::Approx(0.25));
}
