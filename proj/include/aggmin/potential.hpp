#pragma once

#include <string>
#include <variant>

#include <json.hpp>

namespace aggmin {

// W(x) = |x|^a / a - |x|^b / b, convention |x|^0/0 := ln|x|
struct PowerLaw {
    double a = 2.0;
    double b = 1.0;
    int d = 2;
};

// W(x) = c_{d,alpha} |x|^{alpha-d} + c2 |x|^2 / 2
struct RieszQuad {
    int d = 2;
    double alpha = 3.0;
    double c2 = 1.0;
};

// Riesz + quadratic attraction minus a geometric ladder of Gaussians,
// truncated at k_trunc terms:
//   W(x) = c_{d,alpha}|x|^{alpha-d} + c2 |x|^2/2
//          - c_w sum_{k=1}^{K} lambda^{(alpha-d)k} exp(-|x|^2 / (2 lambda^{2k}))
struct HierGauss {
    int d = 2;
    double alpha = 3.0;
    double lambda = 0.15;
    double c_w = 0.25;
    int k_trunc = 7;
    double c2 = 1.0;
};

// Piecewise kernel whose level-k Cantor iterate is an exact steady state.
// Only W and W' are pinned (W'' piecewise constant between breakpoints).
struct CantorPotential {
    double m_ratio = 12.0;
    double alpha = 5.0;
    int level = 1;
};

using PotentialSpec = std::variant<PowerLaw, RieszQuad, HierGauss, CantorPotential>;

// throws parameter_error when a family invariant is violated
void validate(const PotentialSpec& spec);
int dimension(const PotentialSpec& spec);

// c_{d,alpha} = Gamma((d-alpha)/2) / (pi^{d/2} 2^alpha Gamma(alpha/2));
// at alpha = d the kernel switches to the logarithm branch with
// coefficient -2 / (pi^{d/2} 2^alpha Gamma(alpha/2)).
struct RieszConstant {
    int d;
    double alpha;
    double value;
    bool log_branch;
};
RieszConstant riesz_constant(int d, double alpha);

// W, W', or W'' at radius r > 0 (order 0, 1, 2)
double eval(const PotentialSpec& spec, double r, int order);

// closed-form radial Fourier transform at |xi| = xi > 0 (RieszQuad/HierGauss only;
// the quadratic term lives at xi = 0 and is excluded)
double fourier_hat(const PotentialSpec& spec, double xi);

// c(d,alpha), C(d,alpha) and whether the window c < C is nonempty
struct Thresholds {
    double c_small;
    double c_big;
    bool fractal_range_ok;
};
Thresholds thresholds(int d, double alpha);

// truncation error bound of the Gaussian ladder: lambda^{(alpha-d)(K+1)} / (1 - lambda^{alpha-d})
double ladder_truncation_bound(const HierGauss& hg);

nlohmann::json spec_to_json(const PotentialSpec& spec);
PotentialSpec spec_from_json(const nlohmann::json& j);

std::string family_name(const PotentialSpec& spec);

} // namespace aggmin
