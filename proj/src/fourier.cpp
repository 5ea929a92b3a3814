#include "aggmin/fourier.hpp"

#include <algorithm>
#include <cmath>

#include "aggmin/energy.hpp"
#include "aggmin/errors.hpp"
#include "aggmin/parallel.hpp"
#include "aggmin/quadrature.hpp"

namespace aggmin {

namespace {

double spec_alpha(const PotentialSpec& spec) {
    if (const auto* rq = std::get_if<RieszQuad>(&spec)) return rq->alpha;
    if (const auto* hg = std::get_if<HierGauss>(&spec)) return hg->alpha;
    throw unsupported_spec_error("window scan: spec has no closed-form transform");
}

} // namespace

WindowScan scan_windows(const PotentialSpec& spec, double xi_max, std::size_t samples) {
    if (!(xi_max > 0.0) || samples < 2) throw domain_error("scan_windows: bad scan range");
    const double alpha = spec_alpha(spec);
    WindowScan out;
    out.spec = spec;
    out.xi_max = xi_max;
    out.samples = samples;
    const double step = xi_max / static_cast<double>(samples);
    // refine a sign change to ~1e-12 relative by bisection
    auto refine = [&](double a, double b) {
        double fa = fourier_hat(spec, a);
        for (int it = 0; it < 80 && (b - a) > 1e-12 * b; ++it) {
            double m = 0.5 * (a + b);
            double fm = fourier_hat(spec, m);
            if ((fm < 0.0) == (fa < 0.0)) {
                a = m;
                fa = fm;
            } else {
                b = m;
            }
        }
        return 0.5 * (a + b);
    };
    double prev_xi = step, prev_v = fourier_hat(spec, prev_xi);
    double win_lo = prev_v < 0.0 ? prev_xi : -1.0;
    double depth = prev_v;
    for (std::size_t i = 2; i <= samples; ++i) {
        double xi = step * static_cast<double>(i);
        double v = fourier_hat(spec, xi);
        if (v < 0.0) {
            if (win_lo < 0.0) {
                win_lo = refine(prev_xi, xi);
                depth = v;
            }
            depth = std::min(depth, v);
        } else if (win_lo >= 0.0) {
            double hi = refine(prev_xi, xi);
            double width = hi - win_lo;
            double sup = -1e300;
            // sup of W_hat over the window from the sampled interior
            for (double x = win_lo + 0.5 * step; x < hi; x += step)
                sup = std::max(sup, fourier_hat(spec, x));
            if (sup == -1e300) sup = depth;
            out.windows.push_back(NegativeWindow{win_lo, hi, 0.5 * (win_lo + hi), width, depth,
                                                 -sup * std::pow(width, alpha)});
            win_lo = -1.0;
        }
        prev_xi = xi;
        prev_v = v;
    }
    if (win_lo >= 0.0)
        out.windows.push_back(NegativeWindow{win_lo, xi_max, 0.5 * (win_lo + xi_max),
                                             xi_max - win_lo, depth,
                                             -depth * std::pow(xi_max - win_lo, alpha)});
    return out;
}

namespace {

// radial bump phi(x) = e * exp(-1/(1 - 16|x|^2)) on |x| < 1/4, normalized to
// phi(0) = 1; supported well inside the unit-window ball B(0, 1/2)
double bump(double t) {
    double q = 16.0 * t * t;
    if (q >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - q));
}

// Phi(s) = 2 pi int_0^{1/4} phi(t) J0(s t) t dt  (2D radial transform of phi)
std::vector<double> bump_radial_table(double s_max, std::size_t n_tab) {
    const GaussRule& g = gauss_legendre(200);
    std::vector<double> tq(200), wq(200), ph(200);
    for (int i = 0; i < 200; ++i) {
        tq[i] = (g.x[i] + 1.0) * 0.125;
        wq[i] = g.w[i] * 0.125;
        ph[i] = bump(tq[i]) * tq[i];
    }
    std::vector<double> tab(n_tab);
    parallel_for(0, n_tab, [&](std::size_t i) {
        double s = s_max * static_cast<double>(i) / static_cast<double>(n_tab - 1);
        double acc = 0.0;
        for (int q = 0; q < 200; ++q) acc += wq[q] * ph[q] * std::cyl_bessel_j(0.0, s * tq[q]);
        tab[i] = 2.0 * M_PI * acc;
    });
    return tab;
}

} // namespace

ConcavityWitness build_witness(const PotentialSpec& spec, double delta, const WindowScan& scan) {
    if (!(delta > 0.0)) throw domain_error("build_witness: delta must be positive");
    if (dimension(spec) != 2)
        throw unsupported_spec_error("build_witness: witness grids are 2D");
    const double r_min = 4.0 * M_PI / delta;
    std::vector<const NegativeWindow*> candidates;
    for (const auto& w : scan.windows)
        if (w.width >= r_min) candidates.push_back(&w);
    if (candidates.empty())
        throw witness_not_found_error("build_witness: no window wide enough for this delta");
    std::sort(candidates.begin(), candidates.end(),
              [](const NegativeWindow* a, const NegativeWindow* b) { return a->center < b->center; });

    const int n = 256;
    const double h = delta / n;
    for (const NegativeWindow* w : candidates) {
        const double R = w->width, xiJ = w->center;
        // inverse transform of the symmetric bump pair, direct quadrature of
        // the Fourier integral reduced to the radial profile:
        //   mu1(x) = 2 (2pi)^{-2} R^2 cos(xiJ x1) Phi(R |x|)
        // imaginary parts of the two bumps cancel by symmetry
        double s_max = R * delta * 0.7071067811865476 + 1.0;
        std::vector<double> tab = bump_radial_table(s_max, 8192);
        auto interp = [&](double s) {
            double u = s / s_max * 8191.0;
            std::size_t i = std::min<std::size_t>(8190, static_cast<std::size_t>(u));
            double f = u - static_cast<double>(i);
            return tab[i] * (1.0 - f) + tab[i + 1] * f;
        };
        GridMeasure mu;
        mu.dim = 2;
        mu.h = h;
        mu.origin = {-delta / 2.0, -delta / 2.0};
        mu.extents = {n, n};
        mu.values.assign(static_cast<std::size_t>(n) * n, 0.0);
        std::vector<double> mu1(mu.values.size(), 0.0);
        std::vector<char> inball(mu.values.size(), 0);
        const double amp = 2.0 * R * R / (4.0 * M_PI * M_PI);
        double sum_in = 0.0;
        std::size_t count_in = 0;
        for (int i = 0; i < n; ++i) {
            double x1 = -delta / 2.0 + (i + 0.5) * h;
            for (int j = 0; j < n; ++j) {
                double x2 = -delta / 2.0 + (j + 0.5) * h;
                double r = std::sqrt(x1 * x1 + x2 * x2);
                std::size_t idx = static_cast<std::size_t>(i) * n + j;
                mu1[idx] = amp * std::cos(xiJ * x1) * interp(R * r);
                if (r <= delta / 2.0) {
                    inball[idx] = 1;
                    sum_in += mu1[idx];
                    ++count_in;
                }
            }
        }
        double mean = sum_in / static_cast<double>(count_in);
        for (std::size_t idx = 0; idx < mu.values.size(); ++idx)
            if (inball[idx]) mu.values[idx] = (mu1[idx] - mean) * h * h;
        double e = energy(spec, mu);
        if (e < 0.0) {
            ConcavityWitness cw;
            cw.delta = delta;
            cw.energy = e;
            cw.window = *w;
            cw.bump_width = R;
            cw.imag_residual = 0.0; // cancels identically for the symmetric pair
            double tv = mu.total_variation();
            cw.mean_residual = tv > 0.0 ? std::abs(mu.total_mass()) / tv : 0.0;
            // support diameter over charged midpoints: bounded by the ball
            double rmax = 0.0;
            for (std::size_t idx = 0; idx < mu.values.size(); ++idx)
                if (mu.values[idx] != 0.0) {
                    auto x = mu.midpoint(idx);
                    rmax = std::max(rmax, std::sqrt(x[0] * x[0] + x[1] * x[1]));
                }
            cw.support_diameter = 2.0 * rmax;
            cw.mu = std::move(mu);
            return cw;
        }
    }
    throw witness_not_found_error("build_witness: all candidate windows gave nonnegative energy");
}

FlicForm flic_form(const PotentialSpec& spec, const GridMeasure& mu, double band_lo,
                   double band_hi) {
    mu.check();
    if (!(band_hi > band_lo) || !(band_lo >= 0.0)) throw domain_error("flic_form: bad band");
    double tv = mu.total_variation();
    if (tv > 0.0 && std::abs(mu.total_mass()) > 1e-10 * tv)
        throw domain_error("flic_form: measure must be mean-zero");
    double integral = 0.0;
    const int n_rad = 1024;
    if (mu.dim == 1) {
        auto f = [&](double xi) {
            double v[1] = {xi};
            return std::norm(mu_hat(mu, std::span<const double>(v, 1)));
        };
        integral = 2.0 * gauss_integrate(f, band_lo, band_hi, n_rad);
    } else if (mu.dim == 2) {
        const int n_ang = 64;
        const GaussRule& g = gauss_legendre(n_rad);
        double mid = 0.5 * (band_lo + band_hi), half = 0.5 * (band_hi - band_lo);
        for (int q = 0; q < n_rad; ++q) {
            double s = mid + half * g.x[q];
            double ring = 0.0;
            for (int a = 0; a < n_ang; ++a) {
                double th = 2.0 * M_PI * (a + 0.5) / n_ang;
                double v[2] = {s * std::cos(th), s * std::sin(th)};
                ring += std::norm(mu_hat(mu, std::span<const double>(v, 2)));
            }
            integral += g.w[q] * half * s * ring * (2.0 * M_PI / n_ang);
        }
    } else {
        throw domain_error("flic_form: dim must be 1 or 2");
    }
    return FlicForm{integral, energy(spec, mu)};
}

nlohmann::json to_json(const NegativeWindow& w) {
    return nlohmann::json{{"lo", w.lo},          {"hi", w.hi},     {"center", w.center},
                          {"width", w.width},    {"depth", w.depth},
                          {"c1_fitted", w.c1_fitted}};
}

nlohmann::json to_json(const WindowScan& s) {
    nlohmann::json wins = nlohmann::json::array();
    for (const auto& w : s.windows) wins.push_back(to_json(w));
    return nlohmann::json{{"spec", spec_to_json(s.spec)},
                          {"xi_max", s.xi_max},
                          {"samples", s.samples},
                          {"windows", wins}};
}

nlohmann::json to_json(const ConcavityWitness& w) {
    return nlohmann::json{{"delta", w.delta},
                          {"energy", w.energy},
                          {"window", to_json(w.window)},
                          {"bump_width", w.bump_width},
                          {"imag_residual", w.imag_residual},
                          {"mean_residual", w.mean_residual},
                          {"support_diameter", w.support_diameter}};
}

} // namespace aggmin
