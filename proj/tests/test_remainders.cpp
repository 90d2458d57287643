/// Unit tests for the nonlinear error terms of the linearization step.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "axishock/background.hpp"
#include "axishock/coefficients.hpp"
#include "axishock/remainders.hpp"
#include "axishock/upstream.hpp"

using namespace axishock;

namespace {

BackgroundSolution reference_background() {
    GasLaw gas(1.4);
    auto f = ForceProfile::constant(0.5, 0.0);
    State1D inlet{1.0, 2.0, 1.0};
    Branch1D sup = integrate_branch(gas, inlet, 0.0, 2.0, f, 2048);
    const double Pe = exit_pressure_of_shock_position(gas, sup, 1.0, 2.0, f, {});
    return solve_background(gas, Pe, inlet, f, 0.0, 2.0, {});
}

struct Setup {
    BackgroundSolution bg;
    MassGeometry geom;
    CoefficientTable co;
    UpstreamField up;
    int n1, n2;
};

Setup make_setup(int n1, int n2, const PerturbationData& pert) {
    Setup s{reference_background(), {}, {}, {}, n1, n2};
    s.up = march_supersonic(s.bg.gas, s.bg, pert, {});
    s.geom = make_mass_geometry(s.bg, s.up.mass_half_width());
    s.co = compute_coefficients(s.bg, s.geom, n1);
    return s;
}

/// Smooth test iterate with the correct parities, of overall size eps.
Iterate bump_iterate(const Setup& s, double eps) {
    Iterate it = Iterate::zero(s.n1, s.n2, s.geom.M);
    for (int i = 0; i <= s.n1; ++i) {
        const double t = (s.co.z1[i] - s.geom.Lb) / (s.geom.L2 - s.geom.Lb);
        const double a = std::sin(1.0 + 2.0 * t);
        for (int j = 0; j <= s.n2; ++j) {
            const double z = s.geom.h2(s.n2) * j / s.geom.M; // in [0,1]
            it.w1(i, j) = eps * a * (1.0 - 0.3 * z * z);
            it.w2(i, j) = eps * a * z * (1.0 - z * z);
            it.w3(i, j) = eps * 0.7 * a * z * (1.0 - z);
            it.w4(i, j) = eps * 0.5 * a * (1.0 + 0.2 * z * z);
        }
    }
    for (int j = 0; j <= s.n2; ++j) {
        const double z = s.geom.h2(s.n2) * j / s.geom.M;
        it.w5.w5[j] = eps * 0.5 * (1.0 + std::cos(3.141592653589793 * z)) * 0.5;
    }
    return it;
}

} // namespace

TEST_CASE("remainders: zero iterate and unperturbed data give vanishing errors") {
    Setup s = make_setup(24, 24, PerturbationData::none(0.0, 2.0));
    Iterate z = Iterate::zero(s.n1, s.n2, s.geom.M);
    auto rb = nonlinear_remainders(z, s.up, s.bg, s.co, s.geom,
                                   PerturbationData::none(0.0, 2.0));
    CHECK(rb.F3.max_abs() < 1e-9);
    CHECK(rb.F4.max_abs() < 1e-9);
    CHECK(rb.G1.max_abs() < 1e-9);
    CHECK(rb.G2.max_abs() < 1e-9);
    for (int j = 0; j <= s.n2; ++j) {
        CHECK(std::abs(rb.R1[j]) < 1e-9);
        CHECK(std::abs(rb.R4[j]) < 1e-9);
        CHECK(std::abs(rb.h1[j]) < 1e-9);
        CHECK(std::abs(rb.h2[j]) < 1e-8);
        CHECK(std::abs(rb.h3[j]) < 1e-9);
        CHECK(std::abs(rb.q2t[j]) < 1e-8);
        CHECK(std::abs(rb.q3t[j]) < 1e-9);
    }
    for (int i = 0; i <= s.n1; ++i) CHECK(rb.h4[i] == 0.0);
    // The reconstructed radius and density match the background.
    for (int i = 0; i <= s.n1; i += 6)
        for (int j = 0; j <= s.n2; j += 6) {
            CHECK(rb.rhat(i, j) ==
                  doctest::Approx(s.geom.kappa_b * s.geom.h2(s.n2) * j).epsilon(1e-10));
            CHECK(rb.rho_hat(i, j) ==
                  doctest::Approx(s.bg.sub(s.co.z1[i]).rho).epsilon(1e-10));
        }
}

TEST_CASE("remainders: displaced 1-D shock reproduces the background difference") {
    // The exact transonic solution with the shock moved to Lb + eps is
    // one-dimensional; the jump error terms must then equal the nonlinear
    // part of the background-to-background difference.
    Setup s = make_setup(32, 32, PerturbationData::none(0.0, 2.0));
    const double eps = 1e-3;
    GasLaw gas(1.4);
    auto f = ForceProfile::constant(0.5, 0.0);
    State1D inlet{1.0, 2.0, 1.0};
    const double Pe2 = exit_pressure_of_shock_position(gas, s.bg.supersonic,
                                                       s.bg.Lb + eps, 2.0, f, {});
    BackgroundSolution bg2 = solve_background(gas, Pe2, inlet, f, 0.0, 2.0, {});
    const double d5 = bg2.Lb - s.bg.Lb;
    REQUIRE(std::abs(d5 - eps) < 1e-9);

    Iterate it = Iterate::zero(s.n1, s.n2, s.geom.M);
    const double dB = bg2.B_plus() - s.bg.B_plus();
    for (int j = 0; j <= s.n2; ++j) it.w5.w5[j] = d5;
    DomainMap map(it.w5, s.geom.Lb, s.geom.L2);
    for (int i = 0; i <= s.n1; ++i)
        for (int j = 0; j <= s.n2; ++j) {
            const double y1 = map.D0(s.co.z1[i], j);
            it.w1(i, j) = bg2.sub(y1).u - s.bg.sub(y1).u;
            it.w4(i, j) = dB;
        }

    auto rb = nonlinear_remainders(it, s.up, s.bg, s.co, s.geom,
                                   PerturbationData::none(0.0, 2.0));
    const double psi = s.bg.Lb + d5;
    const double rho_dot = bg2.sub(psi).rho - s.bg.sub(psi).rho;
    const double v1 = bg2.sub(psi).u - s.bg.sub(psi).u;
    for (int j = 0; j <= s.n2; j += 4) {
        CHECK(std::abs(rb.R1[j] - (rho_dot - s.co.b1 * d5)) < 1e-9);
        CHECK(std::abs(rb.R2[j] - (v1 - s.co.b2 * d5)) < 1e-9);
        CHECK(std::abs(rb.R3[j] - (dB - s.co.b3 * d5)) < 1e-9);
        CHECK(std::abs(rb.h1[j]) < 1e-10); // no radial flow
        // The jump errors are quadratically small in the displacement.
        CHECK(std::abs(rb.R1[j]) < 50 * eps * eps);
        CHECK(std::abs(rb.R2[j]) < 50 * eps * eps);
        CHECK(std::abs(rb.R3[j]) < 50 * eps * eps);
    }
    // Purely axial displaced flow: the second-equation sources vanish.
    CHECK(rb.F4.max_abs() < 1e-10);
    CHECK(rb.G2.max_abs() < 1e-9);

    // The displaced solution satisfies the first equation: applying the
    // frozen-coefficient operator reproduces F3 up to FD truncation.
    const double h1g = s.co.h1();
    double worst = 0.0;
    for (int j = 0; j <= s.n2; j += 8)
        for (int i = 1; i < s.n1; ++i) {
            const double dw1 = (it.w1(i + 1, j) - it.w1(i - 1, j)) / (2.0 * h1g);
            const double lhs = s.co.d1[i] * dw1 + s.co.d3[i] * it.w1(i, j) +
                               s.co.d4[i] * it.w4(i, j);
            worst = std::max(worst, std::abs(lhs - rb.F3(i, j)));
        }
    CHECK(worst < 20 * h1g * h1g * eps + 1e-10);
}

TEST_CASE("remainders: interior and jump errors are quadratically small") {
    Setup s = make_setup(24, 24, PerturbationData::none(0.0, 2.0));
    auto size = [&](double eps) {
        Iterate it = bump_iterate(s, eps);
        auto rb = nonlinear_remainders(it, s.up, s.bg, s.co, s.geom,
                                       PerturbationData::none(0.0, 2.0));
        double m = rb.F3.max_abs() + rb.F4.max_abs();
        for (int j = 0; j <= s.n2; ++j)
            m = std::max({m, std::abs(rb.R1[j]), std::abs(rb.R4[j]),
                          std::abs(rb.h1[j])});
        return m;
    };
    const double m1 = size(0.02), m2 = size(0.01), m3 = size(0.005);
    CHECK(m1 / m2 == doctest::Approx(4.0).epsilon(0.3));
    CHECK(m2 / m3 == doctest::Approx(4.0).epsilon(0.3));
}

TEST_CASE("remainders: data terms scale linearly in sigma at zero iterate") {
    auto data_size = [](double sigma) {
        PerturbationData pert = PerturbationData::builtin(sigma, 0.0, 2.0);
        Setup s = make_setup(16, 24, pert);
        Iterate z = Iterate::zero(s.n1, s.n2, s.geom.M);
        auto rb = nonlinear_remainders(z, s.up, s.bg, s.co, s.geom, pert);
        double m = rb.G1.max_abs() + rb.G2.max_abs();
        for (int j = 0; j <= s.n2; ++j)
            m = std::max({m, std::abs(rb.h2[j]), std::abs(rb.h3[j]),
                          std::abs(rb.q2t[j]), std::abs(rb.q3t[j])});
        for (int i = 0; i <= s.n1; ++i) m = std::max(m, std::abs(rb.h4[i]));
        return m;
    };
    const double a = data_size(0.002), b = data_size(0.004);
    CHECK(b / a == doctest::Approx(2.0).epsilon(0.25));
}

TEST_CASE("remainders: structural properties of the reduced sources") {
    PerturbationData pert = PerturbationData::builtin(0.01, 0.0, 2.0);
    Setup s = make_setup(20, 28, pert);
    Iterate it = bump_iterate(s, 0.01);
    auto rb = nonlinear_remainders(it, s.up, s.bg, s.co, s.geom, pert);
    for (int i = 0; i <= s.n1; ++i) {
        CHECK(rb.G2(i, 0) == 0.0);                    // odd across the axis
        CHECK(rb.G2_tail(i, s.n2) == 0.0);            // tail anchored at the wall
    }
    for (int j = 0; j <= s.n2; ++j)
        CHECK(rb.I0[j] == rb.G2_tail(0, j));
    CHECK(std::abs(rb.h2[0]) < 1e-12);                // axis compatibility
    // d/dz2 of the integrated Robin data recovers its integrand.
    const double h2g = s.geom.h2(s.n2);
    for (int j = 1; j < s.n2; ++j) {
        const double d = (rb.q2t[j + 1] - rb.q2t[j - 1]) / (2.0 * h2g);
        const double q2 = rb.G2(0, j) + s.co.b4 * rb.h2[j];
        CHECK(d == doctest::Approx(q2).epsilon(5e-2).scale(0.1));
    }
}
