#include "axishock/elliptic.hpp"

#include <cmath>
#include <stdexcept>

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>

#include "axishock/errors.hpp"

namespace axishock {

EllipticProblem build_elliptic_problem(const RemainderBundle& rb, const CoefficientTable& co,
                                       const MassGeometry& geom) {
    const int n1 = co.n1();
    const int n2 = static_cast<int>(rb.I0.size()) - 1;
    EllipticProblem p;
    p.z1 = co.z1;
    p.M = geom.M;
    p.lambda1 = co.lambda1;
    p.lambda2 = co.lambda2;
    p.lambda3 = co.lambda3;
    p.b5 = co.b5;
    p.q2t = rb.q2t;
    p.q3t = rb.q3t;
    p.h4 = rb.h4;
    p.rhs0 = Field2D(n1 + 1, n2 + 1);
    p.Gflux = Field2D(n1 + 1, n2 + 1);
    const double w = co.b3 / (co.b2 * co.b4); // nonlocal recovery weight (negative)
    for (int i = 0; i <= n1; ++i) {
        const double zer = co.lambda0[i] * co.d4[i] / co.d1[i] * w;
        for (int j = 0; j <= n2; ++j) {
            p.rhs0(i, j) = co.lambda0[i] / co.d1[i] * rb.G1(i, j) - zer * rb.I0[j] +
                           co.lambda3[i] * rb.q2t[j];
            // J = tail integral of G2 plus its nonlocal share.
            const double J = rb.G2_tail(i, j) + w * co.d5[i] * rb.I0[j];
            p.Gflux(i, j) = -co.lambda1[i] * J;
        }
    }
    return p;
}

namespace {

struct Assembled {
    std::vector<Eigen::Triplet<double>> trip;
    Eigen::VectorXd b;
};

/// Builds the finite-difference system A phi = b (flux form, half-cell
/// boundary rows, nonlocal column at i = 0).
Assembled assemble_fd(const EllipticProblem& p) {
    const int n1 = p.n1(), n2 = p.n2();
    const double h1 = p.h1(), h2 = p.h2();
    const int N = (n1 + 1) * (n2 + 1);
    auto id = [n2](int i, int j) { return i * (n2 + 1) + j; };

    Assembled out;
    out.b = Eigen::VectorXd::Zero(N);
    out.trip.reserve(static_cast<size_t>(N) * 6);
    auto lam1h = [&](int i) { return 0.5 * (p.lambda1[i] + p.lambda1[i + 1]); };
    auto gfh = [&](int i, int j) { return 0.5 * (p.Gflux(i, j) + p.Gflux(i + 1, j)); };

    for (int i = 0; i <= n1; ++i) {
        for (int j = 0; j <= n2; ++j) {
            const int row = id(i, j);
            double diag = 0.0;
            double b = p.rhs0(i, j);

            // Axial flux divergence with F = lambda1 d1phi - Gflux.
            if (i == 0) {
                const double c = 2.0 * lam1h(0) / (h1 * h1);
                out.trip.emplace_back(row, id(1, j), c);
                diag -= c;
                diag -= 2.0 / h1 * p.lambda1[0] * p.b5;
                b += 2.0 / h1 * (gfh(0, j) - p.Gflux(0, j) + p.lambda1[0] * p.q2t[j]);
            } else if (i == n1) {
                const double c = 2.0 * lam1h(n1 - 1) / (h1 * h1);
                out.trip.emplace_back(row, id(n1 - 1, j), c);
                diag -= c;
                b -= 2.0 / h1 *
                     (p.lambda1[n1] * p.q3t[j] - p.Gflux(n1, j) + gfh(n1 - 1, j));
            } else {
                const double cp = lam1h(i) / (h1 * h1), cm = lam1h(i - 1) / (h1 * h1);
                out.trip.emplace_back(row, id(i + 1, j), cp);
                out.trip.emplace_back(row, id(i - 1, j), cm);
                diag -= cp + cm;
                b += (gfh(i, j) - gfh(i - 1, j)) / h1;
            }

            // Radial part lambda2 (d2^2 + d2/z2) with axis and wall closures.
            const double lam2 = p.lambda2[i];
            if (j == 0) {
                const double c = 4.0 * lam2 / (h2 * h2);
                out.trip.emplace_back(row, id(i, 1), c);
                diag -= c;
            } else if (j == n2) {
                const double c = 2.0 * lam2 / (h2 * h2);
                out.trip.emplace_back(row, id(i, n2 - 1), c);
                diag -= c;
                b -= lam2 * (2.0 * p.h4[i] / h2 + p.h4[i] / p.M);
            } else {
                const double z2 = h2 * j;
                const double cp = lam2 * (1.0 / (h2 * h2) + 1.0 / (2.0 * h2 * z2));
                const double cm = lam2 * (1.0 / (h2 * h2) - 1.0 / (2.0 * h2 * z2));
                out.trip.emplace_back(row, id(i, j + 1), cp);
                out.trip.emplace_back(row, id(i, j - 1), cm);
                diag -= 2.0 * lam2 / (h2 * h2);
            }

            // Nonlocal coupling to the shock trace of the potential.
            if (i == 0)
                diag -= p.lambda3[i] * p.b5;
            else
                out.trip.emplace_back(row, id(0, j), -p.lambda3[i] * p.b5);

            out.trip.emplace_back(row, row, diag);
            out.b(row) = b;
        }
    }
    return out;
}

} // namespace

EllipticSolution solve_elliptic_fd(const EllipticProblem& p) {
    const int n1 = p.n1(), n2 = p.n2();
    const int N = (n1 + 1) * (n2 + 1);
    Assembled sys = assemble_fd(p);
    Eigen::SparseMatrix<double> A(N, N);
    A.setFromTriplets(sys.trip.begin(), sys.trip.end());
    A.makeCompressed();
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(A);
    lu.factorize(A);
    if (lu.info() != Eigen::Success)
        throw SolverError("solve_elliptic_fd: factorization failed");
    Eigen::VectorXd x = lu.solve(sys.b);

    EllipticSolution sol;
    sol.phi_star = Field2D(n1 + 1, n2 + 1);
    for (int i = 0; i <= n1; ++i)
        for (int j = 0; j <= n2; ++j) sol.phi_star(i, j) = x(i * (n2 + 1) + j);
    sol.Lambda = sol.phi_star(0, n2);
    sol.residual = (A * x - sys.b).cwiseAbs().maxCoeff();
    return sol;
}

double elliptic_fd_residual(const EllipticProblem& p, const Field2D& phi) {
    const int n1 = p.n1(), n2 = p.n2();
    const int N = (n1 + 1) * (n2 + 1);
    Assembled sys = assemble_fd(p);
    Eigen::SparseMatrix<double> A(N, N);
    A.setFromTriplets(sys.trip.begin(), sys.trip.end());
    Eigen::VectorXd x(N);
    for (int i = 0; i <= n1; ++i)
        for (int j = 0; j <= n2; ++j) x(i * (n2 + 1) + j) = phi(i, j);
    return (A * x - sys.b).cwiseAbs().maxCoeff();
}

std::vector<double> bessel_j1_roots(int n) {
    std::vector<double> roots;
    roots.reserve(n);
    double x = 0.5, fx = std::cyl_bessel_j(1, 0.5);
    const double step = 0.05;
    while (static_cast<int>(roots.size()) < n) {
        const double y = x + step;
        const double fy = std::cyl_bessel_j(1, y);
        if (fx == 0.0) roots.push_back(x);
        if (fx * fy < 0.0) {
            double a = x, b = y;
            for (int it = 0; it < 100; ++it) {
                const double m = 0.5 * (a + b);
                const double fm = std::cyl_bessel_j(1, m);
                if (fx * fm <= 0.0)
                    b = m;
                else
                    a = m;
            }
            roots.push_back(0.5 * (a + b));
        }
        x = y;
        fx = fy;
    }
    return roots;
}

EllipticSolution solve_elliptic_modes(const EllipticProblem& p, int nmodes) {
    const int n1 = p.n1(), n2 = p.n2();
    const double h1 = p.h1(), h2 = p.h2(), M = p.M;
    // Default mode count: half the radial cell count.  Modes near the
    // Nyquist spacing of the z2 samples are dominated by quadrature noise
    // in their projections, which piles up in the exit boundary layers of
    // the per-mode two-point problems.
    const int K = (nmodes > 0) ? nmodes : std::max(8, n2 / 2);

    // Mode shapes J0(alpha_k z2 / M) with J1(alpha_k) = 0; alpha_0 = 0.
    std::vector<double> alpha(K, 0.0);
    if (K > 1) {
        auto r = bessel_j1_roots(K - 1);
        for (int k = 1; k < K; ++k) alpha[k] = r[k - 1];
    }
    std::vector<std::vector<double>> B(K, std::vector<double>(n2 + 1));
    std::vector<double> norm(K, 0.0), wq(n2 + 1);
    for (int j = 0; j <= n2; ++j)
        wq[j] = h2 * (h2 * j) * ((j == 0 || j == n2) ? 0.5 : 1.0);
    for (int k = 0; k < K; ++k) {
        for (int j = 0; j <= n2; ++j)
            B[k][j] = std::cyl_bessel_j(0, alpha[k] * (h2 * j) / M);
        for (int j = 0; j <= n2; ++j) norm[k] += wq[j] * B[k][j] * B[k][j];
        // Euler-Maclaurin endpoint correction of the trapezoid rule for
        // g = B_k^2 z2, using B_k'(0) = B_k'(M) = 0.
        norm[k] += h2 * h2 / 12.0 * (1.0 - B[k][n2] * B[k][n2]);
    }
    // Weighted projection onto mode k with the same endpoint correction:
    // g = f B_k z2 has g'(0) = f(0) and g'(M) = (f'(M) M + f(M)) B_k(M).
    auto project = [&](const std::vector<double>& f, int k) {
        double s = 0.0;
        for (int j = 0; j <= n2; ++j) s += wq[j] * f[j] * B[k][j];
        const double fpM =
            (3.0 * f[n2] - 4.0 * f[n2 - 1] + f[n2 - 2]) / (2.0 * h2);
        s += h2 * h2 / 12.0 * (f[0] - (fpM * M + f[n2]) * B[k][n2]);
        return s / norm[k];
    };

    // Lift the wall data: phi = psi + h4(z1) z2^2 / (2M), psi has a
    // homogeneous wall condition.
    std::vector<double> dh4 = ddx(p.h4, h1);
    auto lift = [&](int i, int j) { return p.h4[i] * (h2 * j) * (h2 * j) / (2.0 * M); };

    std::vector<double> row(n2 + 1);
    std::vector<std::vector<double>> rhs_k(K, std::vector<double>(n1 + 1));
    std::vector<std::vector<double>> gf_k(K, std::vector<double>(n1 + 1));
    for (int i = 0; i <= n1; ++i) {
        for (int j = 0; j <= n2; ++j)
            row[j] = p.rhs0(i, j) + p.lambda3[i] * p.b5 * lift(0, j) -
                     2.0 * p.lambda2[i] * p.h4[i] / M;
        for (int k = 0; k < K; ++k) rhs_k[k][i] = project(row, k);
        for (int j = 0; j <= n2; ++j)
            row[j] = p.Gflux(i, j) - p.lambda1[i] * dh4[i] * (h2 * j) * (h2 * j) / (2.0 * M);
        for (int k = 0; k < K; ++k) gf_k[k][i] = project(row, k);
    }
    std::vector<double> q2row(n2 + 1), q3row(n2 + 1);
    for (int j = 0; j <= n2; ++j) {
        const double zz = (h2 * j) * (h2 * j) / (2.0 * M);
        q2row[j] = p.q2t[j] - dh4[0] * zz + p.b5 * p.h4[0] * zz;
        q3row[j] = p.q3t[j] - dh4[n1] * zz;
    }

    EllipticSolution sol;
    sol.phi_star = Field2D(n1 + 1, n2 + 1, 0.0);
    sol.residual = 0.0;

    auto lam1h = [&](int i) { return 0.5 * (p.lambda1[i] + p.lambda1[i + 1]); };
    std::vector<double> lo(n1 + 1), di(n1 + 1), up(n1 + 1), rhs(n1 + 1), cnl(n1 + 1);
    auto thomas = [&](std::vector<double> a, std::vector<double> b, std::vector<double> c,
                      std::vector<double> d) {
        const int n = static_cast<int>(b.size());
        for (int i = 1; i < n; ++i) {
            const double m = a[i] / b[i - 1];
            b[i] -= m * c[i - 1];
            d[i] -= m * d[i - 1];
        }
        std::vector<double> x(n);
        x[n - 1] = d[n - 1] / b[n - 1];
        for (int i = n - 2; i >= 0; --i) x[i] = (d[i] - c[i] * x[i + 1]) / b[i];
        return x;
    };

    for (int k = 0; k < K; ++k) {
        const double q2k = project(q2row, k), q3k = project(q3row, k);
        const double mass = (alpha[k] / M) * (alpha[k] / M);
        for (int i = 0; i <= n1; ++i) {
            lo[i] = up[i] = 0.0;
            double diag = -p.lambda2[i] * mass;
            double b = rhs_k[k][i];
            if (i == 0) {
                const double c = 2.0 * lam1h(0) / (h1 * h1);
                up[0] = c;
                diag -= c + 2.0 / h1 * p.lambda1[0] * p.b5;
                const double gfhalf = 0.5 * (gf_k[k][0] + gf_k[k][1]);
                b += 2.0 / h1 * (gfhalf - gf_k[k][0] + p.lambda1[0] * q2k);
            } else if (i == n1) {
                const double c = 2.0 * lam1h(n1 - 1) / (h1 * h1);
                lo[n1] = c;
                diag -= c;
                const double gfhalf = 0.5 * (gf_k[k][n1 - 1] + gf_k[k][n1]);
                b -= 2.0 / h1 * (p.lambda1[n1] * q3k - gf_k[k][n1] + gfhalf);
            } else {
                const double cp = lam1h(i) / (h1 * h1), cm = lam1h(i - 1) / (h1 * h1);
                up[i] = cp;
                lo[i] = cm;
                diag -= cp + cm;
                const double gp = 0.5 * (gf_k[k][i] + gf_k[k][i + 1]);
                const double gm = 0.5 * (gf_k[k][i - 1] + gf_k[k][i]);
                b += (gp - gm) / h1;
            }
            di[i] = diag;
            rhs[i] = b;
            cnl[i] = (i == 0) ? 0.0 : -p.lambda3[i] * p.b5;
        }
        di[0] -= p.lambda3[0] * p.b5; // nonlocal term is diagonal in the first row

        // Rank-one update A = T + cnl e0^T solved by Sherman-Morrison.
        auto y = thomas(lo, di, up, rhs);
        auto z = thomas(lo, di, up, cnl);
        const double denom = 1.0 + z[0];
        if (std::abs(denom) < 1e-14)
            throw SolverError("solve_elliptic_modes: degenerate nonlocal closure");
        std::vector<double> phik(n1 + 1);
        for (int i = 0; i <= n1; ++i) phik[i] = y[i] - z[i] * (y[0] / denom);

        // Per-mode residual of the tridiagonal-plus-rank-one system.
        double res = 0.0;
        for (int i = 0; i <= n1; ++i) {
            double ax = di[i] * phik[i] + cnl[i] * phik[0];
            if (i > 0) ax += lo[i] * phik[i - 1];
            if (i < n1) ax += up[i] * phik[i + 1];
            res = std::max(res, std::abs(ax - rhs[i]));
        }
        sol.residual = std::max(sol.residual, res);

        for (int i = 0; i <= n1; ++i)
            for (int j = 0; j <= n2; ++j) sol.phi_star(i, j) += phik[i] * B[k][j];
    }
    for (int i = 0; i <= n1; ++i)
        for (int j = 0; j <= n2; ++j) sol.phi_star(i, j) += lift(i, j);
    sol.Lambda = sol.phi_star(0, n2);
    return sol;
}

} // namespace axishock
