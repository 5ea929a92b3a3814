#pragma once

#include <functional>
#include <optional>
#include <vector>

#include "aggmin/measure.hpp"
#include "aggmin/potential.hpp"

namespace aggmin {

// E[mu] = (1/2) sum_{i != j} w_i w_j W(|x_i - x_j|); self pairs excluded
double energy(const PotentialSpec& spec, const ParticleEnsemble& mu);

// midpoint double sum; the diagonal cell uses the cell-averaged kernel
double energy(const PotentialSpec& spec, const GridMeasure& mu);

// bilinear form B(mu, nu) with E[mu] = B(mu, mu); grids must share geometry
double energy_cross(const PotentialSpec& spec, const GridMeasure& mu, const GridMeasure& nu);

// V, grad V, or laplacian V at each request point (order 0, 1, 2).
// order 0 and 2 fill one value per point, order 1 fills dim values per point.
struct FieldSamples {
    int order;
    int dim;
    std::vector<double> values;
};
FieldSamples field(const PotentialSpec& spec, const ParticleEnsemble& mu,
                   const std::vector<double>& points, int order);
FieldSamples field(const PotentialSpec& spec, const GridMeasure& mu,
                   const std::vector<double>& points, int order);

// Euler-Lagrange residuals: steady_max = max |grad V| over support samples;
// d2_violation = max(0, C_rho - min V over an off-support probe grid),
// C_rho = 2 E[rho].  eps0 sets the probe exclusion tube (<= 0 picks 2h).
struct ElResidual {
    double steady_max;
    double d2_violation;
    double c_rho;
    double probe_band;
    std::size_t probe_count;
};
ElResidual el_residual(const PotentialSpec& spec, const ParticleEnsemble& mu, double eps0 = 0.0);
ElResidual el_residual(const PotentialSpec& spec, const GridMeasure& mu, double eps0 = 0.0);

// Explicit global minimizer profiles for W = |x|^a/a - |x|^b/b:
//   a = 2:  rho(x) = A (R^2 - |x|^2)^{1 - (b+d)/2} on |x| <= R
//   a = 4:  rho(x) = (A1 R^2 + A2 (R^2 - |x|^2)) (R^2 - |x|^2)^{1 - (b+d)/2}
struct ExplicitMinimizer {
    int d;
    double a;
    double b;
    double radius;
    double amplitude;      // A (a=2) or A1 (a=4)
    double amplitude2;     // A2 (a=4 only)
    double mass_check;     // quadrature mass, should be 1 within 1e-8

    double density(double r) const; // radial profile, 0 outside [0, radius)
};
ExplicitMinimizer explicit_minimizer(int d, double a, double b);

// |grad (W * rho)| at radius s, radial quadrature with n_r x n_ang nodes
double minimizer_radial_residual(const ExplicitMinimizer& em, double s, int n_r = 512,
                                 int n_ang = 256);

// rasterize the d=2 profile onto a grid (mass-exact polar deposit)
GridMeasure minimizer_to_grid(const ExplicitMinimizer& em, int cells_per_side);

// Appendix identity for d = 1, W = -|x|^b / b (b = 0: -ln|x|):
//   lhs = int (W * mu) mu, computed in closed form for the piecewise-constant
//         density the grid measure represents;
//   rhs = int |xi|^{-b-1} |mu_hat(xi)|^2 dxi, truncated at 32 pi / h with a
//         dyadically graded mesh near 0.
struct AppendixIdentity {
    double lhs;
    double rhs_integral;
    double fitted_c;
    double xi_max;
};
AppendixIdentity appendix_identity_check(double b, const GridMeasure& mu);

} // namespace aggmin
