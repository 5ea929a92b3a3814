#pragma once

#include <functional>
#include <vector>

namespace aggmin {

// Gauss-Legendre nodes/weights on [-1, 1]. Cached per order.
struct GaussRule {
    std::vector<double> x;
    std::vector<double> w;
};

const GaussRule& gauss_legendre(int n);

// integral of f over [a, b] with an n-point Gauss rule
double gauss_integrate(const std::function<double(double)>& f, double a, double b, int n);

// Mean of a radial kernel over one grid cell centered at the origin,
// (1/h^d) * integral_cell W(|x|).  Exact in the radial direction for d=2
// (polar split of the square), Gauss in the remaining variable; node count
// doubles until two refinements agree to 1e-13 relative.
double cell_average_radial(const std::function<double(double)>& w_of_r, double h, int dim);

} // namespace aggmin
