#include "aggmin/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <stdexcept>

namespace aggmin {

namespace {

GaussRule compute_rule(int n) {
    // Newton on Legendre P_n, starting from the Chebyshev-like estimate.
    GaussRule r;
    r.x.resize(n);
    r.w.resize(n);
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(M_PI * (i + 0.75) / (n + 0.5));
        double pp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            pp = n * (x * p1 - p0) / (x * x - 1.0);
            double dx = p1 / pp;
            x -= dx;
            if (std::abs(dx) < 1e-15) break;
        }
        r.x[i] = -x;
        r.x[n - 1 - i] = x;
        double w = 2.0 / ((1.0 - x * x) * pp * pp);
        r.w[i] = w;
        r.w[n - 1 - i] = w;
    }
    return r;
}

} // namespace

const GaussRule& gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("gauss_legendre: order must be >= 1");
    static std::map<int, GaussRule> cache;
    static std::mutex mtx;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(n);
    if (it == cache.end()) it = cache.emplace(n, compute_rule(n)).first;
    return it->second;
}

double gauss_integrate(const std::function<double(double)>& f, double a, double b, int n) {
    const GaussRule& g = gauss_legendre(n);
    const double mid = 0.5 * (a + b), half = 0.5 * (b - a);
    double s = 0.0;
    for (int i = 0; i < n; ++i) s += g.w[i] * f(mid + half * g.x[i]);
    return s * half;
}

namespace {

double cell_average_once(const std::function<double(double)>& w, double h, int dim, int n) {
    if (dim == 1) {
        // (2/h) * integral_0^{h/2} w(r) dr
        return gauss_integrate(w, 0.0, 0.5 * h, n) * 2.0 / h;
    }
    if (dim == 2) {
        // Square split into 8 congruent triangles; integrate radially, Gauss in angle:
        // (8/h^2) * int_0^{pi/4} int_0^{(h/2)sec t} w(r) r dr dt
        auto inner = [&](double t) {
            double rmax = 0.5 * h / std::cos(t);
            return gauss_integrate([&](double r) { return w(r) * r; }, 0.0, rmax, n);
        };
        return gauss_integrate(inner, 0.0, M_PI / 4.0, n) * 8.0 / (h * h);
    }
    throw std::invalid_argument("cell_average_radial: dim must be 1, 2, or 3");
}

} // namespace

double cell_average_radial(const std::function<double(double)>& w_of_r, double h, int dim) {
    if (dim == 3) {
        // Direct tensor Gauss over the positive octant of the cell; radial kernels
        // are smooth off 0 and integrable at 0 for every supported family.
        int n = 24;
        double prev = 0.0;
        for (int pass = 0; pass < 5; ++pass) {
            const GaussRule& g = gauss_legendre(n);
            double s = 0.0;
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j)
                    for (int k = 0; k < n; ++k) {
                        double x = 0.25 * h * (g.x[i] + 1.0);
                        double y = 0.25 * h * (g.x[j] + 1.0);
                        double z = 0.25 * h * (g.x[k] + 1.0);
                        s += g.w[i] * g.w[j] * g.w[k] * w_of_r(std::sqrt(x * x + y * y + z * z));
                    }
            s /= 8.0; // product of the three (b-a)/2 = h/4 factors over (h/2)^3 volume
            if (pass > 0 && std::abs(s - prev) <= 1e-13 * (std::abs(s) + 1e-30)) return s;
            prev = s;
            n *= 2;
        }
        return prev;
    }
    int n = 32;
    double prev = cell_average_once(w_of_r, h, dim, n);
    for (int pass = 0; pass < 4; ++pass) {
        n *= 2;
        double cur = cell_average_once(w_of_r, h, dim, n);
        if (std::abs(cur - prev) <= 1e-13 * (std::abs(cur) + 1e-30)) return cur;
        prev = cur;
    }
    return prev;
}

} // namespace aggmin
