#pragma once

#include <cassert>
#include <cstddef>
#include <vector>

namespace axishock {

/// Dense node-centred scalar field on an (n1+1) x (n2+1) tensor grid,
/// stored row-major with the first index varying slowest.
class Field2D {
  public:
    Field2D() = default;
    Field2D(int n1_nodes, int n2_nodes, double fill = 0.0)
        : n1_(n1_nodes), n2_(n2_nodes), v_(static_cast<size_t>(n1_nodes) * n2_nodes, fill) {}

    int n1() const { return n1_; } ///< node count, first (axial) direction
    int n2() const { return n2_; } ///< node count, second (radial) direction

    double& operator()(int i, int j) {
        assert(i >= 0 && i < n1_ && j >= 0 && j < n2_);
        return v_[static_cast<size_t>(i) * n2_ + j];
    }
    double operator()(int i, int j) const {
        assert(i >= 0 && i < n1_ && j >= 0 && j < n2_);
        return v_[static_cast<size_t>(i) * n2_ + j];
    }

    const std::vector<double>& data() const { return v_; }
    std::vector<double>& data() { return v_; }

    double max_abs() const {
        double m = 0.0;
        for (double x : v_) m = std::max(m, std::abs(x));
        return m;
    }

  private:
    int n1_ = 0, n2_ = 0;
    std::vector<double> v_;
};

/// Parity tags used when differencing across the symmetry axis.
enum class AxisParity { Even, Odd };

/// Centred first derivative of a sampled profile with one-sided
/// second-order closures at both ends.
inline std::vector<double> ddx(const std::vector<double>& f, double h) {
    const int n = static_cast<int>(f.size());
    std::vector<double> d(n, 0.0);
    if (n < 3) return d;
    d[0] = (-3.0 * f[0] + 4.0 * f[1] - f[2]) / (2.0 * h);
    for (int i = 1; i + 1 < n; ++i) d[i] = (f[i + 1] - f[i - 1]) / (2.0 * h);
    d[n - 1] = (3.0 * f[n - 1] - 4.0 * f[n - 2] + f[n - 3]) / (2.0 * h);
    return d;
}

/// Same, but the left end sits on the symmetry axis and the profile has
/// known parity there: even profiles get derivative 0, odd ones use the
/// reflected neighbour.
inline std::vector<double> ddx_axis(const std::vector<double>& f, double h, AxisParity p) {
    std::vector<double> d = ddx(f, h);
    const int n = static_cast<int>(f.size());
    if (n < 2) return d;
    d[0] = (p == AxisParity::Even) ? 0.0 : f[1] / h; // odd: (f(h)-f(-h))/2h = f(h)/h
    return d;
}

/// Cumulative trapezoid of f on a uniform grid with spacing h, anchored
/// at zero on the left.
inline std::vector<double> cumtrapz(const std::vector<double>& f, double h) {
    std::vector<double> F(f.size(), 0.0);
    for (size_t i = 1; i < f.size(); ++i)
        F[i] = F[i - 1] + 0.5 * h * (f[i - 1] + f[i]);
    return F;
}

/// Trapezoid integral of a sampled profile on a uniform grid.
inline double trapz(const std::vector<double>& f, double h) {
    if (f.size() < 2) return 0.0;
    double s = 0.5 * (f.front() + f.back());
    for (size_t i = 1; i + 1 < f.size(); ++i) s += f[i];
    return s * h;
}

} // namespace axishock
