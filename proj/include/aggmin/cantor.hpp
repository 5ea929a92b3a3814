#pragma once

#include <vector>

#include <json.hpp>

#include "aggmin/cantor_kernel.hpp"
#include "aggmin/measure.hpp"
#include "aggmin/piecewise.hpp"

namespace aggmin {

// Exact convolution of a kernel piece (W_k or W_k', given as a full-line
// PiecewisePoly) with a Cantor iterate.  No sampling error: the result's
// segment coefficients come from closed-form segment integrals of the
// antiderivative.
PiecewisePoly exact_convolve(const PiecewisePoly& kernel, const CantorIterate& rho);

struct MarginSample {
    double x0;
    double margin; // (W_k * rho_k)(x0) - c_k
};

struct CantorVerification {
    double m_ratio = 0.0;
    double alpha = 0.0;
    int level = 0;
    double plateau = 0.0;            // c_k, convention W_k(0+) = 0
    double plateau_mismatch = 0.0;   // |V(0) - V(1)|
    double steady_residual = -1.0;   // max |W_k' * rho_k| on supp rho_k
    double second_deriv_residual = -1.0; // coefficient residual of W_k'' * rho_k on supp
    std::vector<MarginSample> margins;
    bool gate_prop_m = false; // (M+2)/3 < alpha <= 2(M-10)/5
    bool pass = false;
};

nlohmann::json to_json(const CantorVerification& v);

// steadiness: max over supp rho_k of |(W_k' * rho_k)|, exact path
CantorVerification verify_steady(double m_ratio, double alpha, int level);

// margins (W_k*rho_k)(x0) - c_k at off-support probes; throws
// probe_on_support_error when a probe lies on supp rho_k
CantorVerification verify_margin(double m_ratio, double alpha, int level,
                                 const std::vector<double>& probes);

// max over x in [0, 1/M] of the defect in
//   V_k(x) - V_k(0) = (1/2M) (V_{k-1}(Mx) - V_{k-1}(0))
double self_similarity_check(double m_ratio, double alpha, int level);

// convolution profile V = W_k * rho_k for plots / CSV export
PiecewisePoly potential_profile(double m_ratio, double alpha, int level);

} // namespace aggmin
