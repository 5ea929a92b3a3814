#pragma once

#include "aggmin/piecewise.hpp"

namespace aggmin {

// W_k' for the hierarchical Cantor kernel: odd, piecewise linear, with
//   W_k'(x) = (M/(2M-4)) (-1 + 2x) + omega_k(x)   for x > 0,
// omega_k the continuous piecewise-linear connector with parameter alpha.
// Breakpoints on (0, 1] are { 1_(j), (M-alpha)_(j), (M-2)_(j), M_(j) } for
// j = 1..k with a_(j) = a M^{-j}.  For level 0 the connector is identically
// zero and the kernel reduces to (M/(2M-4))(-|x| + x^2)'.
PiecewisePoly cantor_kernel_derivative(double m_ratio, double alpha, int level);

// W_k itself: even antiderivative normalized by W_k(0+) = 0
PiecewisePoly cantor_kernel(double m_ratio, double alpha, int level);

// validates M > 3, 2 < alpha <= M-1, level >= 0
void validate_cantor_params(double m_ratio, double alpha, int level);

} // namespace aggmin
