/// Unit tests for the nonlocal potential problem solvers.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "axishock/background.hpp"
#include "axishock/coefficients.hpp"
#include "axishock/elliptic.hpp"
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

/// Problem whose exact solution is cos(k(z1-Lb)) (1 + z2^2/2 - z2^4/8),
/// with a nonzero flux-differentiated source.
struct Manufactured {
    EllipticProblem p;
    Field2D exact;
};

Manufactured manufactured_problem(const BackgroundSolution& bg, int n) {
    MassGeometry geom = make_mass_geometry(bg, 1.0);
    CoefficientTable co = compute_coefficients(bg, geom, n);
    const double k = 2.0, Lb = geom.Lb;
    auto R = [](double z) { return 1.0 + 0.5 * z * z - 0.125 * z * z * z * z; };
    auto Rp = [](double z) { return z - 0.5 * z * z * z; };
    auto Rlap = [](double z) { return 2.0 - 2.0 * z * z; }; // (d2^2 + d2/z2) R

    Manufactured m;
    m.p.z1 = co.z1;
    m.p.M = geom.M;
    m.p.lambda1 = co.lambda1;
    m.p.lambda2 = co.lambda2;
    m.p.lambda3 = co.lambda3;
    m.p.b5 = co.b5;
    m.p.rhs0 = Field2D(n + 1, n + 1);
    m.p.Gflux = Field2D(n + 1, n + 1);
    m.p.q2t.resize(n + 1);
    m.p.q3t.resize(n + 1);
    m.p.h4.resize(n + 1);
    m.exact = Field2D(n + 1, n + 1);
    const double h2 = geom.M / n;
    for (int i = 0; i <= n; ++i) {
        const double t = co.z1[i] - Lb;
        const double X = std::cos(k * t), Xp = -k * std::sin(k * t);
        const double Xpp = -k * k * X;
        const double lam1p = co.lambda1[i] * co.d3[i] / co.d1[i]; // d2 constant
        m.p.h4[i] = X * Rp(geom.M);
        for (int j = 0; j <= n; ++j) {
            const double z = h2 * j;
            m.exact(i, j) = X * R(z);
            m.p.Gflux(i, j) = std::sin(k * t) * z * z * 0.3;
            const double dGflux = k * std::cos(k * t) * z * z * 0.3;
            const double phi0 = R(z); // exact value at z1 = Lb (X(0) = 1)
            m.p.rhs0(i, j) = lam1p * Xp * R(z) + co.lambda1[i] * Xpp * R(z) +
                             co.lambda2[i] * X * Rlap(z) -
                             co.lambda3[i] * co.b5 * phi0 - dGflux;
        }
    }
    for (int j = 0; j <= n; ++j) {
        const double z = h2 * j;
        m.p.q2t[j] = 0.0 - co.b5 * R(z);                     // d1phi(Lb) = 0
        m.p.q3t[j] = -k * std::sin(k * (geom.L2 - Lb)) * R(z);
    }
    return m;
}

double max_err(const Field2D& a, const Field2D& b) {
    double m = 0.0;
    for (int i = 0; i < a.n1(); ++i)
        for (int j = 0; j < a.n2(); ++j) m = std::max(m, std::abs(a(i, j) - b(i, j)));
    return m;
}

} // namespace

TEST_CASE("elliptic: first Bessel J1 roots match reference values") {
    auto r = bessel_j1_roots(4);
    CHECK(r[0] == doctest::Approx(3.8317059702075123).epsilon(1e-12));
    CHECK(r[1] == doctest::Approx(7.015586669815619).epsilon(1e-12));
    CHECK(r[2] == doctest::Approx(10.173468135062722).epsilon(1e-12));
    CHECK(r[3] == doctest::Approx(13.323691936314223).epsilon(1e-12));
}

TEST_CASE("elliptic: zero data gives the zero potential in both backends") {
    BackgroundSolution bg = reference_background();
    Manufactured m = manufactured_problem(bg, 16);
    m.p.rhs0 = Field2D(17, 17, 0.0);
    m.p.Gflux = Field2D(17, 17, 0.0);
    std::fill(m.p.q2t.begin(), m.p.q2t.end(), 0.0);
    std::fill(m.p.q3t.begin(), m.p.q3t.end(), 0.0);
    std::fill(m.p.h4.begin(), m.p.h4.end(), 0.0);
    auto fd = solve_elliptic_fd(m.p);
    auto md = solve_elliptic_modes(m.p);
    CHECK(fd.phi_star.max_abs() < 1e-11);
    CHECK(md.phi_star.max_abs() < 1e-11);
    CHECK(fd.residual < 1e-11);
    CHECK(md.residual < 1e-11);
}

TEST_CASE("elliptic: finite differences converge at second order") {
    BackgroundSolution bg = reference_background();
    double e_prev = 0.0;
    int n = 12;
    std::vector<double> errs;
    for (int lev = 0; lev < 3; ++lev, n *= 2) {
        Manufactured m = manufactured_problem(bg, n);
        auto sol = solve_elliptic_fd(m.p);
        errs.push_back(max_err(sol.phi_star, m.exact));
        CHECK(sol.residual < 1e-9);
        // The assembled-residual helper agrees with the direct solve.
        CHECK(elliptic_fd_residual(m.p, sol.phi_star) ==
              doctest::Approx(sol.residual).epsilon(1e-6).scale(1e-12));
        (void)e_prev;
    }
    CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.35));
    CHECK(errs[1] / errs[2] == doctest::Approx(4.0).epsilon(0.35));
    CHECK(errs[2] < 2e-3);
}

TEST_CASE("elliptic: mode expansion converges to the same solution") {
    BackgroundSolution bg = reference_background();
    std::vector<double> errs;
    for (int n : {16, 32, 64}) {
        Manufactured m = manufactured_problem(bg, n);
        auto sol = solve_elliptic_modes(m.p);
        errs.push_back(max_err(sol.phi_star, m.exact));
        CHECK(sol.residual < 1e-9);
    }
    CHECK(errs[0] / errs[1] > 2.0);
    CHECK(errs[1] / errs[2] > 2.0);
    CHECK(errs[2] < 5e-3);

    // Direct cross check of the two backends on one grid.
    Manufactured m = manufactured_problem(bg, 48);
    auto fd = solve_elliptic_fd(m.p);
    auto md = solve_elliptic_modes(m.p);
    CHECK(max_err(fd.phi_star, md.phi_star) < 2e-3);
    CHECK(fd.Lambda == doctest::Approx(md.Lambda).epsilon(2e-3).scale(1.0));
}

TEST_CASE("elliptic: assembled pipeline problem is solvable and consistent") {
    BackgroundSolution bg = reference_background();
    PerturbationData pert = PerturbationData::builtin(0.01, 0.0, 2.0);
    const int n1 = 24, n2 = 24;
    UpstreamField up = march_supersonic(bg.gas, bg, pert, {});
    MassGeometry geom = make_mass_geometry(bg, up.mass_half_width());
    CoefficientTable co = compute_coefficients(bg, geom, n1);
    Iterate z = Iterate::zero(n1, n2, geom.M);
    auto rb = nonlinear_remainders(z, up, bg, co, geom, pert);
    EllipticProblem p = build_elliptic_problem(rb, co, geom);
    CHECK(p.n1() == n1);
    CHECK(p.n2() == n2);

    auto fd = solve_elliptic_fd(p);
    CHECK(std::isfinite(fd.Lambda));
    CHECK(fd.residual < 1e-10);
    CHECK(elliptic_fd_residual(p, fd.phi_star) < 1e-10);
    // The perturbation is small, so the potential is of its size.
    CHECK(fd.phi_star.max_abs() < 0.2);
    CHECK(fd.phi_star.max_abs() > 1e-6);

    auto md = solve_elliptic_modes(p);
    CHECK(md.residual < 1e-9);
    CHECK(max_err(fd.phi_star, md.phi_star) < 0.05 * std::max(1e-3, fd.phi_star.max_abs()));
}
