#pragma once

#include <vector>

#include <json.hpp>

#include "aggmin/measure.hpp"
#include "aggmin/potential.hpp"

namespace aggmin {

// one maximal interval of strictly negative transform samples
struct NegativeWindow {
    double lo;
    double hi;
    double center;     // xi_J
    double width;      // R = hi - lo
    double depth;      // min of W_hat on the window
    double c1_fitted;  // (-sup_J W_hat) * R^alpha
};

struct WindowScan {
    PotentialSpec spec;
    double xi_max;
    std::size_t samples;
    std::vector<NegativeWindow> windows;
};

WindowScan scan_windows(const PotentialSpec& spec, double xi_max, std::size_t samples);

// Mean-zero perturbation at scale delta built from a symmetric Fourier bump
// pair on a negative window; accepted when its grid energy is negative.
struct ConcavityWitness {
    double delta;
    GridMeasure mu;
    double energy;
    NegativeWindow window;
    double bump_width;        // R of the window used
    double imag_residual;     // max imaginary part of the inverse transform
    double mean_residual;     // |sum mu| / sum |mu|
    double support_diameter;  // over charged cell midpoints
};

// grid extent delta, h = delta / 256; tries windows with width >= 4 pi / delta
// in increasing center until the energy is negative
ConcavityWitness build_witness(const PotentialSpec& spec, double delta, const WindowScan& scan);

// band functional int_{r <= |xi| <= R} |mu_hat|^2 together with the energy
struct FlicForm {
    double band_integral;
    double energy;
};
FlicForm flic_form(const PotentialSpec& spec, const GridMeasure& mu, double band_lo,
                   double band_hi);

nlohmann::json to_json(const WindowScan& s);
nlohmann::json to_json(const ConcavityWitness& w);

} // namespace aggmin
