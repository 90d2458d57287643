/// Unit tests for the supersonic upstream marching and manufactured fields.
#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "axishock/background.hpp"
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

} // namespace

TEST_CASE("march_supersonic: sigma=0 reproduces the background, uniform in r") {
    BackgroundSolution bg = reference_background();
    PerturbationData none = PerturbationData::none(0.0, 2.0);
    MarchOptions opt;
    UpstreamField field = march_supersonic(bg.gas, bg, none, opt);
    double dev = 0.0;
    for (double x : {0.0, 0.31, 1.0, 1.57, 2.0}) {
        const State1D s = bg.sup(x);
        for (double r : {0.0, 0.25, 0.6, 1.0}) {
            const FlowState q = field.eval_cubic(x, r);
            dev = std::max({dev, std::abs(q.u_x - s.u), std::abs(q.P - s.P),
                            std::abs(q.u_r), std::abs(q.u_theta)});
        }
    }
    CHECK(dev < 1e-10);
}

TEST_CASE("march_supersonic: axis compatibility and radial derivative order") {
    BackgroundSolution bg = reference_background();
    PerturbationData pert = PerturbationData::builtin(0.01, 0.0, 2.0);
    MarchOptions opt;
    opt.nr = 64;
    UpstreamField f = march_supersonic(bg.gas, bg, pert, opt);
    const int i = f.nx() / 2;
    const double he = 1.0 / f.nr();
    // One-sided first derivative of the even fields at the axis, O(h^2).
    auto dr0 = [&](const Field2D& v) {
        return (-3 * v(i, 0) + 4 * v(i, 1) - v(i, 2)) / (2 * he);
    };
    const double h2 = he * he;
    CHECK(std::abs(dr0(f.ux())) < 50 * h2);
    CHECK(std::abs(dr0(f.P())) < 50 * h2);
    CHECK(f.ur()(i, 0) == 0.0);
    CHECK(f.ut()(i, 0) == 0.0);
}

TEST_CASE("march_supersonic: r u_theta is conserved along streamlines") {
    BackgroundSolution bg = reference_background();
    PerturbationData pert = PerturbationData::builtin(0.01, 0.0, 2.0);
    MarchOptions opt;
    opt.nr = 64;
    UpstreamField f = march_supersonic(bg.gas, bg, pert, opt);
    // Trace a streamline from (L1, r0) by dr/dx = u_r/u_x (RK2) and record
    // the drift of r u_theta along it.
    for (double r0 : {0.3, 0.6, 0.85}) {
        double r = r0;
        const FlowState s0 = f.eval_cubic(0.0, r0);
        const double invariant = r0 * s0.u_theta;
        const int n = 400;
        const double h = 2.0 / n;
        double worst = 0.0;
        for (int k = 0; k < n; ++k) {
            const double x = k * h;
            const FlowState a = f.eval_cubic(x, r);
            const double r_mid = r + 0.5 * h * a.u_r / a.u_x;
            const FlowState b = f.eval_cubic(x + 0.5 * h, r_mid);
            r += h * b.u_r / b.u_x;
            const FlowState c = f.eval_cubic(x + h, r);
            worst = std::max(worst, std::abs(r * c.u_theta - invariant));
        }
        CHECK(worst < 5e-6); // O(h^2) of the marching + tracing error
    }
}

TEST_CASE("march_supersonic: section mass flux constant to O(h^2)") {
    BackgroundSolution bg = reference_background();
    PerturbationData pert = PerturbationData::builtin(0.008, 0.0, 2.0);
    MarchOptions opt;
    opt.nr = 64;
    UpstreamField f = march_supersonic(bg.gas, bg, pert, opt);
    const int nr = f.nr();
    auto section_flux = [&](double x) {
        const double R = f.wall_radius(x);
        double acc = 0.0;
        const int n = 256;
        for (int j = 0; j <= n; ++j) {
            const double r = R * j / n;
            const FlowState s = f.eval_cubic(x, r);
            const double w = (j == 0 || j == n) ? 0.5 : 1.0;
            acc += w * r * s.rho * s.u_x;
        }
        return acc * (R / n);
    };
    const double ref = section_flux(0.0);
    const double h2 = 1.0 / (nr * nr);
    for (double x : {0.5, 1.0, 1.5, 2.0})
        CHECK(std::abs(section_flux(x) - ref) < 20 * h2 * ref);
}

TEST_CASE("march_supersonic: deviation from background scales linearly in sigma") {
    BackgroundSolution bg = reference_background();
    MarchOptions opt;
    opt.nr = 48;
    auto deviation = [&](double sigma) {
        PerturbationData pert = PerturbationData::builtin(sigma, 0.0, 2.0);
        UpstreamField f = march_supersonic(bg.gas, bg, pert, opt);
        double dev = 0.0;
        for (double x : {0.4, 1.0, 1.7})
            for (double r : {0.0, 0.3, 0.7, 0.95}) {
                const State1D s = bg.sup(x);
                const FlowState q = f.eval_cubic(x, r * f.wall_radius(x));
                dev = std::max({dev, std::abs(q.u_x - s.u), std::abs(q.P - s.P),
                                std::abs(q.u_r), std::abs(q.u_theta)});
            }
        return dev;
    };
    const double d1 = deviation(0.001), d2 = deviation(0.002), d4 = deviation(0.004);
    CHECK(d2 / d1 == doctest::Approx(2.0).epsilon(0.2));
    CHECK(d4 / d2 == doctest::Approx(2.0).epsilon(0.2));
}

TEST_CASE("analytic_upstream: background at sigma=0 and invariants at sigma=0.01") {
    BackgroundSolution bg = reference_background();
    PerturbationData none = PerturbationData::none(0.0, 2.0);
    UpstreamField f0 = analytic_upstream(bg.gas, bg, none);
    CHECK(f0.manufactured());
    for (int i : {16, 200}) {
        const double x = f0.x_nodes()[i];
        const State1D s = bg.sup(x);
        CHECK(f0.eval(x, 0.5).u_x == doctest::Approx(s.u).epsilon(1e-12)); // node: exact
        CHECK(f0.eval(x, 0.5).P == doctest::Approx(s.P).epsilon(1e-12));
    }
    for (double x : {0.2, 1.3}) { // off-node: bilinear O(h^2) only
        const State1D s = bg.sup(x);
        CHECK(f0.eval(x, 0.5).u_x == doctest::Approx(s.u).epsilon(1e-5));
        CHECK(f0.eval(x, 0.5).P == doctest::Approx(s.P).epsilon(1e-5));
    }
    PerturbationData pert = PerturbationData::builtin(0.01, 0.0, 2.0);
    UpstreamField f = analytic_upstream(bg.gas, bg, pert);
    double dev = 0.0;
    for (int i = 0; i <= f.nx(); i += 16)
        for (int j = 0; j <= f.nr(); ++j) {
            const State1D s = bg.sup(f.x_nodes()[i]);
            const double c2 =
                bg.gas.sound_speed_sq(bg.gas.density_of_pressure(f.P()(i, j)));
            const double speed2 = f.ux()(i, j) * f.ux()(i, j) + f.ur()(i, j) * f.ur()(i, j) +
                                  f.ut()(i, j) * f.ut()(i, j);
            CHECK(speed2 > c2); // supersonic everywhere
            dev = std::max(dev, std::abs(f.ux()(i, j) - s.u));
        }
    CHECK(dev <= 1.5 * 0.01); // deviation bounded by C sigma
}

TEST_CASE("evaluate_upstream: node exactness and O(h^2) bilinear error") {
    BackgroundSolution bg = reference_background();
    PerturbationData pert = PerturbationData::builtin(0.01, 0.0, 2.0);
    UpstreamField f = analytic_upstream(bg.gas, bg, pert, 64, 32);
    const int i = 10, j = 7;
    const double x = f.x_nodes()[i];
    const double r = f.eta_nodes()[j] * f.wall_radius(x);
    const FlowState s = evaluate_upstream(f, x, r);
    CHECK(s.u_x == doctest::Approx(f.ux()(i, j)).epsilon(1e-14));
    CHECK(s.P == doctest::Approx(f.P()(i, j)).epsilon(1e-14));
    CHECK_THROWS_AS(evaluate_upstream(f, -0.5, 0.5), std::domain_error);
    CHECK_THROWS_AS(evaluate_upstream(f, 1.0, 2.0), std::domain_error);

    // Manufactured quadratic-in-(x,eta) field: bilinear error is O(h^2).
    auto quad = [](double x_, double eta) { return 1.0 + 0.3 * x_ * x_ + 0.2 * eta * eta; };
    double errs[2];
    int k = 0;
    for (int n : {16, 32}) {
        UpstreamField g(bg.gas, 0.0, 2.0, 0.0, [](double) { return 1.0; }, n, n, true);
        for (int a = 0; a <= n; ++a)
            for (int b = 0; b <= n; ++b) {
                g.ux()(a, b) = 2.0 + quad(g.x_nodes()[a], g.eta_nodes()[b]);
                g.P()(a, b) = 1.0;
                g.ur()(a, b) = g.ut()(a, b) = 0.0;
            }
        double err = 0.0;
        for (double x_ = 0.013; x_ < 2.0; x_ += 0.217)
            for (double r_ = 0.011; r_ < 1.0; r_ += 0.13)
                err = std::max(err,
                               std::abs(g.eval(x_, r_).u_x - (2.0 + quad(x_, r_))));
        errs[k++] = err;
    }
    CHECK(errs[0] / errs[1] == doctest::Approx(4.0).epsilon(0.35));
}
