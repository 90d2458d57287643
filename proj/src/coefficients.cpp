#include "axishock/coefficients.hpp"

#include <cmath>

#include "axishock/errors.hpp"

namespace axishock {

MassGeometry make_mass_geometry(const BackgroundSolution& bg, double M) {
    MassGeometry geom;
    geom.M = M;
    geom.kappa_b = std::sqrt(2.0 / bg.mass_flux);
    geom.Lb = bg.Lb;
    geom.L2 = bg.L2;
    return geom;
}

namespace {

/// d3/d1 evaluated from the subsonic branch at an arbitrary abscissa,
/// used by the Simpson accumulation of lambda0.
double d3_over_d1(const BackgroundSolution& bg, double x) {
    const State1D s = bg.sub(x);
    const double c2 = bg.gas.sound_speed_sq(s.rho);
    const double M2 = s.u * s.u / c2;
    const double d3 = (1.0 + bg.gas.gamma() * M2) * bg.force.g(x) / (c2 - s.u * s.u);
    return d3 / (1.0 - M2);
}

} // namespace

CoefficientTable compute_coefficients(const BackgroundSolution& bg, const MassGeometry& geom,
                                      int n1) {
    if (n1 < 2) throw std::invalid_argument("compute_coefficients: n1 < 2");
    CoefficientTable t;
    t.kappa_b = geom.kappa_b;
    const double gamma = bg.gas.gamma();
    const double h = (geom.L2 - geom.Lb) / n1;

    t.z1.resize(n1 + 1);
    for (auto* v : {&t.ub, &t.ubp, &t.rho, &t.c2, &t.P, &t.g, &t.Mb2, &t.d1, &t.d2, &t.d3,
                    &t.d4, &t.d5, &t.lambda0, &t.lambda1, &t.lambda2, &t.lambda3})
        v->resize(n1 + 1);

    for (int i = 0; i <= n1; ++i) {
        const double x = (i == n1) ? geom.L2 : geom.Lb + h * i;
        t.z1[i] = x;
        const State1D s = bg.sub(x);
        const double c2 = bg.gas.sound_speed_sq(s.rho);
        const double M2 = s.u * s.u / c2;
        if (!(M2 < 1.0))
            throw SonicDegeneracy("compute_coefficients: branch not strictly subsonic");
        t.ub[i] = s.u;
        t.ubp[i] = bg.sub_u_prime(x);
        t.rho[i] = s.rho;
        t.c2[i] = c2;
        t.P[i] = s.P;
        t.g[i] = bg.force.g(x);
        t.Mb2[i] = M2;
        t.d1[i] = 1.0 - M2;
        t.d2[i] = 1.0 / geom.kappa_b;
        t.d3[i] = (1.0 + gamma * M2) * t.g[i] / (c2 - s.u * s.u);
        t.d4[i] = (gamma - 1.0) * t.ubp[i] / c2;
        t.d5[i] = 1.0 / (geom.kappa_b * s.u);
    }

    // Shock scalars from the one-dimensional jump at Lb.
    const State1D& m = bg.minus_at_shock;
    const State1D& p = bg.plus_at_shock;
    const double c2p = bg.gas.sound_speed_sq(p.rho);
    const double gLb = bg.force.g(bg.Lb);
    const double drho = p.rho - m.rho;
    // Linearization of the slope condition psi' = 2 y2 [u_r]/(r [P])
    // around r = kappa_b y2 gives the factor 2.
    t.a1 = 2.0 / (geom.kappa_b * (p.P - m.P));
    t.b1 = -drho * gLb / (c2p - p.u * p.u);
    t.b2 = p.u * drho * gLb / (p.rho * (c2p - p.u * p.u));
    t.b3 = -drho * gLb / p.rho;
    t.b4 = t.d2[0] - t.d5[0] * t.b3 / t.b2;
    t.b5 = t.a1 * t.b2 * t.b4;

    // lambda0 = exp(int_{Lb}^{z1} d3/d1), accumulated per cell by Simpson.
    t.lambda0[0] = 1.0;
    double acc = 0.0;
    for (int i = 1; i <= n1; ++i) {
        const double a = t.z1[i - 1], b = t.z1[i];
        const double wm = d3_over_d1(bg, 0.5 * (a + b));
        acc += (b - a) / 6.0 * (t.d3[i - 1] / t.d1[i - 1] + 4.0 * wm + t.d3[i] / t.d1[i]);
        t.lambda0[i] = std::exp(acc);
    }

    const double nonlocal_weight = -t.b3 / (t.b2 * t.b4); // positive
    for (int i = 0; i <= n1; ++i) {
        t.lambda1[i] = t.lambda0[i] / t.d2[i];
        t.lambda2[i] = t.lambda0[i] * t.d2[i] / t.d1[i];
        // bracket = (d3/d1)(1/u) + (1/u)' + d4/d1 with (1/u)' = -u'/u^2.
        const double bracket = t.d3[i] / t.d1[i] / t.ub[i] -
                               t.ubp[i] / (t.ub[i] * t.ub[i]) + t.d4[i] / t.d1[i];
        t.lambda3[i] = nonlocal_weight * t.lambda0[i] * bracket;
    }
    return t;
}

} // namespace axishock
