#include "axishock/transform.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

#include "axishock/errors.hpp"

namespace axishock {

std::vector<double> ShockCurve::w5_prime() const {
    const int n = static_cast<int>(w5.size());
    const double hh = h();
    std::vector<double> d(n, 0.0);
    if (n < 3) return d;
    d[0] = 0.0; // even reflection at the axis
    for (int j = 1; j + 1 < n; ++j) d[j] = (w5[j + 1] - w5[j - 1]) / (2 * hh);
    d[n - 1] = (3 * w5[n - 1] - 4 * w5[n - 2] + w5[n - 3]) / (2 * hh);
    return d;
}

double ShockCurve::max_abs() const {
    double m = 0.0;
    for (double v : w5) m = std::max(m, std::abs(v));
    return m;
}

std::vector<double> mass_coordinate(const std::vector<double>& r,
                                    const std::vector<double>& flux) {
    if (r.size() != flux.size() || r.size() < 2)
        throw std::invalid_argument("mass_coordinate: mismatched slice");
    std::vector<double> y2(r.size(), 0.0);
    double acc = 0.0;
    for (size_t j = 1; j < r.size(); ++j) {
        if (!(flux[j] > 0.0))
            throw TransformFailure("mass_coordinate: non-positive axial mass flux");
        acc += 0.5 * (r[j] - r[j - 1]) * (r[j - 1] * flux[j - 1] + r[j] * flux[j]);
        y2[j] = std::sqrt(std::max(acc, 0.0));
    }
    return y2;
}

std::vector<double> radius_from_mass(const std::vector<double>& flux, double h2) {
    const size_t n = flux.size();
    std::vector<double> r(n, 0.0);
    double acc = 0.0;
    for (size_t j = 1; j < n; ++j) {
        if (!(flux[j] > 0.0))
            throw TransformFailure("radius_from_mass: non-positive flux");
        const double s0 = (j - 1) * h2, s1 = j * h2;
        acc += 0.5 * (s1 - s0) * (s0 / flux[j - 1] + s1 / flux[j]);
        r[j] = 2.0 * std::sqrt(std::max(acc, 0.0));
    }
    return r;
}

double jacobian_check(const std::vector<double>& r, const std::vector<double>& flux) {
    std::vector<double> y2;
    try {
        y2 = mass_coordinate(r, flux);
    } catch (const TransformFailure&) {
        return -1.0; // non-positive flux reported as non-invertible
    }
    double jmin = std::numeric_limits<double>::infinity();
    for (size_t j = 0; j < r.size(); ++j) {
        double J;
        if (j == 0) {
            // Axis limit: J -> rho u_x / (2 dy2/dr) with dy2/dr -> (rho u_x/2)^(1/2).
            J = std::sqrt(flux[0] / 2.0);
        } else {
            J = r[j] * flux[j] / (2.0 * y2[j]);
        }
        jmin = std::min(jmin, J);
    }
    return jmin;
}

DomainMap::DomainMap(const ShockCurve& curve, double Lb, double L2) : Lb_(Lb), L2_(L2) {
    w5_ = curve.w5;
    w5p_ = curve.w5_prime();
    for (double v : w5_)
        if (!(L2_ - Lb_ - v > 0.5 * (L2_ - Lb_)))
            throw TransformFailure("DomainMap: shock displacement too large for the map");
}

double DomainMap::D0(double z1, int j) const {
    return z1 + (L2_ - z1) / (L2_ - Lb_) * w5_[j];
}

double DomainMap::D1_factor(int j) const {
    return (L2_ - Lb_) / (L2_ - Lb_ - w5_[j]);
}

double DomainMap::D2_shift(double z1, int j) const {
    const double y1 = D0(z1, j);
    return (y1 - L2_) * w5p_[j] / (L2_ - Lb_ - w5_[j]);
}

} // namespace axishock
