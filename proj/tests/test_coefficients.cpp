/// Unit tests for the linearization coefficient tables.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "axishock/background.hpp"
#include "axishock/coefficients.hpp"
#include "axishock/errors.hpp"

using namespace axishock;

namespace {

/// Background with the shock placed at relative position `frac` of the duct.
BackgroundSolution make_bg(double g0, double frac) {
    GasLaw gas(1.4);
    auto f = ForceProfile::constant(g0, 0.0);
    State1D inlet{1.0, 2.0, 1.0};
    Branch1D sup = integrate_branch(gas, inlet, 0.0, 2.0, f, 2048);
    const double s = 2.0 * frac;
    const double Pe = exit_pressure_of_shock_position(gas, sup, s, 2.0, f, {});
    return solve_background(gas, Pe, inlet, f, 0.0, 2.0, {});
}

} // namespace

TEST_CASE("coefficients: geometry of the reference background") {
    BackgroundSolution bg = make_bg(0.5, 0.5);
    // Inlet (rho,u) = (1,2): mass flux 2, half width 1, kappa_b = 1.
    MassGeometry geom = make_mass_geometry(bg, std::sqrt(bg.mass_flux / 2.0));
    CHECK(geom.M == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(geom.kappa_b == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(geom.Lb == bg.Lb);
    CHECK(geom.L2 == 2.0);

    CoefficientTable t = compute_coefficients(bg, geom, 64);
    CHECK(t.n1() == 64);
    CHECK(t.z1.front() == doctest::Approx(bg.Lb));
    CHECK(t.z1.back() == doctest::Approx(2.0));
    // d2 = 1/kappa_b is constant; d5 = d2/u.
    for (int i = 0; i <= 64; ++i) {
        CHECK(t.d2[i] == doctest::Approx(1.0 / geom.kappa_b).epsilon(1e-15));
        CHECK(t.d5[i] == doctest::Approx(t.d2[i] / t.ub[i]).epsilon(1e-14));
    }
}

TEST_CASE("coefficients: sign structure across force strengths and shock positions") {
    for (double g0 : {0.2, 0.5, 0.9}) {
        for (double frac : {0.35, 0.5, 0.65}) {
            BackgroundSolution bg = make_bg(g0, frac);
            MassGeometry geom = make_mass_geometry(bg, std::sqrt(bg.mass_flux / 2.0));
            CoefficientTable t = compute_coefficients(bg, geom, 48);
            CHECK(t.a1 > 0.0);  // pressure jumps up across the shock
            CHECK(t.b1 < 0.0);
            CHECK(t.b2 > 0.0);
            CHECK(t.b3 < 0.0);
            CHECK(t.b4 > 0.0);
            CHECK(t.b5 > 0.0);
            for (int i = 0; i <= t.n1(); ++i) {
                CHECK(t.d1[i] > 0.0); // subsonic
                CHECK(t.d2[i] > 0.0);
                CHECK(t.d3[i] > 0.0);
                CHECK(t.d5[i] > 0.0);
                CHECK(t.lambda0[i] >= 1.0); // d3/d1 > 0 => increasing from 1
                CHECK(t.lambda1[i] > 0.0);
                CHECK(t.lambda2[i] > 0.0);
                CHECK(t.lambda3[i] > 0.0);
                CHECK(t.mu(i) < 0.0);
                CHECK(t.ubp[i] < 0.0); // subsonic flow decelerates under g > 0
            }
        }
    }
}

TEST_CASE("coefficients: shock scalars match their closed forms") {
    BackgroundSolution bg = make_bg(0.5, 0.5);
    MassGeometry geom = make_mass_geometry(bg, std::sqrt(bg.mass_flux / 2.0));
    CoefficientTable t = compute_coefficients(bg, geom, 32);
    const State1D p = bg.plus_at_shock;
    const double c2p = bg.gas.sound_speed_sq(p.rho);
    // b3/b2 = -(c^2 - u^2)/u at the shock foot.
    CHECK(t.b3 / t.b2 ==
          doctest::Approx(-(c2p - p.u * p.u) / p.u).epsilon(1e-13));
    // b4 = c^2 / (kappa_b u^2) at the shock foot.
    CHECK(t.b4 == doctest::Approx(c2p / (geom.kappa_b * p.u * p.u)).epsilon(1e-13));
    // a1 = 2 / (kappa_b [P]).
    CHECK(t.a1 ==
          doctest::Approx(2.0 / (geom.kappa_b * bg.entropy_jump())).epsilon(1e-13));
    // b1/b2 = -rho+/u+ and b1 u+ = rho+ b3 tie the three jump scalars together.
    CHECK(t.b1 / t.b2 == doctest::Approx(-p.rho / p.u).epsilon(1e-13));
    CHECK(t.b1 * (c2p - p.u * p.u) ==
          doctest::Approx(p.rho * t.b3).epsilon(1e-13));
}

TEST_CASE("coefficients: lambda3 agrees with its closed-form second route") {
    for (double g0 : {0.3, 0.7}) {
        BackgroundSolution bg = make_bg(g0, 0.5);
        MassGeometry geom = make_mass_geometry(bg, std::sqrt(bg.mass_flux / 2.0));
        CoefficientTable t = compute_coefficients(bg, geom, 64);
        const double w = -t.b3 / (t.b2 * t.b4);
        for (int i = 0; i <= t.n1(); ++i) {
            // Independent route: the bracket collapses to 2 g / (u c^2 (1-M^2)^2).
            const double closed =
                w * t.lambda0[i] * 2.0 * t.g[i] /
                (t.ub[i] * t.c2[i] * t.d1[i] * t.d1[i]);
            CHECK(t.lambda3[i] == doctest::Approx(closed).epsilon(1e-12));
        }
    }
}

TEST_CASE("coefficients: lambda0 solves its logarithmic derivative equation") {
    BackgroundSolution bg = make_bg(0.5, 0.5);
    MassGeometry geom = make_mass_geometry(bg, std::sqrt(bg.mass_flux / 2.0));
    CoefficientTable t = compute_coefficients(bg, geom, 256);
    const double h = t.h1();
    double worst = 0.0;
    for (int i = 1; i < t.n1(); ++i) {
        const double dlog =
            (std::log(t.lambda0[i + 1]) - std::log(t.lambda0[i - 1])) / (2.0 * h);
        worst = std::max(worst, std::abs(dlog - t.d3[i] / t.d1[i]));
    }
    CHECK(worst < 5e-5); // O(h^2) of the centred log-derivative

    // Grid refinement of the accumulated integral: coarse endpoint value
    // converges to the fine one at 4th order (Simpson cells).
    CoefficientTable c32 = compute_coefficients(bg, geom, 32);
    CoefficientTable c64 = compute_coefficients(bg, geom, 64);
    CoefficientTable fine = compute_coefficients(bg, geom, 1024);
    const double e32 = std::abs(c32.lambda0.back() - fine.lambda0.back());
    const double e64 = std::abs(c64.lambda0.back() - fine.lambda0.back());
    CHECK(e64 < e32);
    CHECK(e64 < 1e-8);
}

TEST_CASE("coefficients: lambda1 lambda2 = lambda0^2 / d1 and sonic rejection") {
    BackgroundSolution bg = make_bg(0.5, 0.5);
    MassGeometry geom = make_mass_geometry(bg, std::sqrt(bg.mass_flux / 2.0));
    CoefficientTable t = compute_coefficients(bg, geom, 32);
    for (int i = 0; i <= t.n1(); ++i)
        CHECK(t.lambda1[i] * t.lambda2[i] ==
              doctest::Approx(t.lambda0[i] * t.lambda0[i] / t.d1[i]).epsilon(1e-13));
    CHECK_THROWS_AS(compute_coefficients(bg, geom, 1), std::invalid_argument);
}
