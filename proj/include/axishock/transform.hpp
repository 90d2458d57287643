#pragma once

#include <functional>
#include <vector>

#include "axishock/grid.hpp"

namespace axishock {

/// Geometry of the fixed subsonic rectangle in mass coordinates.
struct MassGeometry {
    double M = 1.0;       ///< mass-coordinate half width
    double kappa_b = 1.0; ///< background radius proportionality (2/(rho+ u+))^(1/2)
    double Lb = 0.0, L2 = 1.0;

    double h1(int n1_cells) const { return (L2 - Lb) / n1_cells; }
    double h2(int n2_cells) const { return M / n2_cells; }
};

/// Shock displacement w5(z2) = psi(z2) - Lb sampled on the z2 grid,
/// together with the scalar Lambda.
struct ShockCurve {
    std::vector<double> w5; ///< n2+1 samples on [0, M]
    double M = 1.0;
    double Lambda = 0.0;

    double h() const { return M / (static_cast<int>(w5.size()) - 1); }
    /// Derivative samples: centred interior, even reflection at the axis,
    /// one-sided at z2 = M.
    std::vector<double> w5_prime() const;
    double max_abs() const;
};

/// Mass coordinate of one x-slice: y2(r_j) = (int_0^{r_j} s F(s) ds)^(1/2)
/// for a sampled positive flux F = rho u_x on radii r (trapezoid rule).
std::vector<double> mass_coordinate(const std::vector<double>& r,
                                    const std::vector<double>& flux);

/// Physical radius from the mass radius: r = 2 (int_0^{z2} s/F(z1,s) ds)^(1/2)
/// with the flux sampled on the uniform z2 grid of spacing h2.  Returns the
/// radius at every node of the slice.
std::vector<double> radius_from_mass(const std::vector<double>& flux, double h2);

/// Minimum of the transform Jacobian r rho u_x / (2 y2) over a sampled
/// slice (axis handled by its limit).  Positive value certifies
/// invertibility.
double jacobian_check(const std::vector<double>& r, const std::vector<double>& flux);

/// Fixed-domain coordinate maps built from a shock displacement.
class DomainMap {
  public:
    DomainMap(const ShockCurve& w5, double Lb, double L2);

    /// D0(z1, j) = z1 + (L2 - z1)/(L2 - Lb) w5(z2_j): physical axial
    /// coordinate of the grid node.
    double D0(double z1, int j) const;
    /// Multiplier of d/dz1 in D1: (L2 - Lb)/(L2 - Lb - w5(z2_j)).
    double D1_factor(int j) const;
    /// Coefficient of the extra d/dz1 term in D2:
    /// (y1 - L2) w5'(z2_j) / (L2 - Lb - w5(z2_j)).
    double D2_shift(double z1, int j) const;

    const std::vector<double>& w5() const { return w5_; }
    const std::vector<double>& w5p() const { return w5p_; }

  private:
    double Lb_, L2_;
    std::vector<double> w5_, w5p_;
};

} // namespace axishock
