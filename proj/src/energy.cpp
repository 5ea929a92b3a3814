#include "aggmin/energy.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstring>
#include <limits>
#include <memory>

#include <fftw3.h>

#include "aggmin/cantor_kernel.hpp"
#include "aggmin/errors.hpp"
#include "aggmin/parallel.hpp"
#include "aggmin/quadrature.hpp"

namespace aggmin {

namespace {

// single-dispatch closure for hot loops; validate() runs once here
std::function<double(double)> make_kernel(const PotentialSpec& spec, int order) {
    validate(spec);
    if (const auto* cp = std::get_if<CantorPotential>(&spec)) {
        auto poly = std::make_shared<PiecewisePoly>(
            order == 0 ? cantor_kernel(cp->m_ratio, cp->alpha, cp->level)
                       : cantor_kernel_derivative(cp->m_ratio, cp->alpha, cp->level));
        if (order == 2) {
            auto d = std::make_shared<PiecewisePoly>(poly->derivative());
            return [d](double r) { return d->eval(r); };
        }
        return [poly](double r) { return poly->eval(r); };
    }
    PotentialSpec s = spec;
    return [s, order](double r) { return eval(s, r, order); };
}

double dist(const double* x, const double* y, int dim) {
    double s = 0.0;
    for (int k = 0; k < dim; ++k) {
        double d = x[k] - y[k];
        s += d * d;
    }
    return std::sqrt(s);
}

// cross-correlation c(delta) = sum_i a[i] b[i+delta] on a 1D/2D lattice,
// returned on the full offset range [-(n-1), n-1]^dim (row-major, size 2n-1 per dim)
std::vector<double> cross_correlation(const std::vector<double>& a, const std::vector<double>& b,
                                      const std::vector<int>& extents) {
    if (extents.size() == 1) {
        int n = extents[0];
        std::vector<double> c(2 * n - 1, 0.0);
        for (int d = -(n - 1); d <= n - 1; ++d) {
            double s = 0.0;
            int lo = std::max(0, -d), hi = std::min(n, n - d);
            for (int i = lo; i < hi; ++i) s += a[i] * b[i + d];
            c[d + n - 1] = s;
        }
        return c;
    }
    int n1 = extents[0], n2 = extents[1];
    std::size_t work = static_cast<std::size_t>(n1) * n2;
    work *= work;
    if (work <= 30'000'000) {
        // direct is cheaper than planning for small grids
        std::vector<double> c(static_cast<std::size_t>(2 * n1 - 1) * (2 * n2 - 1), 0.0);
        for (int i1 = 0; i1 < n1; ++i1)
            for (int i2 = 0; i2 < n2; ++i2) {
                double av = a[static_cast<std::size_t>(i1) * n2 + i2];
                if (av == 0.0) continue;
                for (int j1 = 0; j1 < n1; ++j1)
                    for (int j2 = 0; j2 < n2; ++j2) {
                        double bv = b[static_cast<std::size_t>(j1) * n2 + j2];
                        c[static_cast<std::size_t>(j1 - i1 + n1 - 1) * (2 * n2 - 1) +
                          (j2 - i2 + n2 - 1)] += av * bv;
                    }
            }
        return c;
    }
    // FFT path, zero-padded to kill circular wrap
    int p1 = 1, p2 = 1;
    while (p1 < 2 * n1) p1 *= 2;
    while (p2 < 2 * n2) p2 *= 2;
    std::size_t pn = static_cast<std::size_t>(p1) * p2;
    fftw_complex* fa = fftw_alloc_complex(pn);
    fftw_complex* fb = fftw_alloc_complex(pn);
    std::memset(fa, 0, pn * sizeof(fftw_complex));
    std::memset(fb, 0, pn * sizeof(fftw_complex));
    for (int i1 = 0; i1 < n1; ++i1)
        for (int i2 = 0; i2 < n2; ++i2) {
            fa[static_cast<std::size_t>(i1) * p2 + i2][0] =
                a[static_cast<std::size_t>(i1) * n2 + i2];
            fb[static_cast<std::size_t>(i1) * p2 + i2][0] =
                b[static_cast<std::size_t>(i1) * n2 + i2];
        }
    fftw_plan plan_a = fftw_plan_dft_2d(p1, p2, fa, fa, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_plan plan_b = fftw_plan_dft_2d(p1, p2, fb, fb, FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan_a);
    fftw_execute(plan_b);
    for (std::size_t i = 0; i < pn; ++i) {
        // conj(A) * B
        double re = fa[i][0] * fb[i][0] + fa[i][1] * fb[i][1];
        double im = fa[i][0] * fb[i][1] - fa[i][1] * fb[i][0];
        fa[i][0] = re / static_cast<double>(pn);
        fa[i][1] = im / static_cast<double>(pn);
    }
    fftw_plan plan_i = fftw_plan_dft_2d(p1, p2, fa, fa, FFTW_BACKWARD, FFTW_ESTIMATE);
    fftw_execute(plan_i);
    std::vector<double> c(static_cast<std::size_t>(2 * n1 - 1) * (2 * n2 - 1));
    for (int d1 = -(n1 - 1); d1 <= n1 - 1; ++d1)
        for (int d2 = -(n2 - 1); d2 <= n2 - 1; ++d2) {
            int w1 = (d1 % p1 + p1) % p1;
            int w2 = (d2 % p2 + p2) % p2;
            c[static_cast<std::size_t>(d1 + n1 - 1) * (2 * n2 - 1) + (d2 + n2 - 1)] =
                fa[static_cast<std::size_t>(w1) * p2 + w2][0];
        }
    fftw_destroy_plan(plan_a);
    fftw_destroy_plan(plan_b);
    fftw_destroy_plan(plan_i);
    fftw_free(fa);
    fftw_free(fb);
    return c;
}

double grid_pair_energy(const PotentialSpec& spec, const GridMeasure& mu,
                        const std::vector<double>& a, const std::vector<double>& b) {
    auto w0 = make_kernel(spec, 0);
    double diag = cell_average_radial(w0, mu.h, mu.dim);
    if (!std::isfinite(diag))
        throw singularity_error("grid energy: kernel is not integrable over a cell");
    std::vector<double> corr = cross_correlation(a, b, mu.extents);
    double e = 0.0, comp = 0.0;
    auto accumulate = [&](double term) {
        double y = term - comp;
        double t = e + y;
        comp = (t - e) - y;
        e = t;
    };
    if (mu.dim == 1) {
        int n = mu.extents[0];
        for (int d = -(n - 1); d <= n - 1; ++d) {
            double wv = (d == 0) ? diag : w0(std::abs(d) * mu.h);
            accumulate(0.5 * corr[d + n - 1] * wv);
        }
    } else {
        int n1 = mu.extents[0], n2 = mu.extents[1];
        for (int d1 = -(n1 - 1); d1 <= n1 - 1; ++d1)
            for (int d2 = -(n2 - 1); d2 <= n2 - 1; ++d2) {
                double wv;
                if (d1 == 0 && d2 == 0)
                    wv = diag;
                else
                    wv = w0(mu.h * std::sqrt(double(d1) * d1 + double(d2) * d2));
                accumulate(0.5 *
                           corr[static_cast<std::size_t>(d1 + n1 - 1) * (2 * n2 - 1) +
                                (d2 + n2 - 1)] *
                           wv);
            }
    }
    return e;
}

} // namespace

double energy(const PotentialSpec& spec, const ParticleEnsemble& mu) {
    mu.check();
    auto w0 = make_kernel(spec, 0);
    const std::size_t n = mu.size();
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double* xi = mu.pos.data() + i * mu.dim;
        for (std::size_t j = i + 1; j < n; ++j) {
            double r = dist(xi, mu.pos.data() + j * mu.dim, mu.dim);
            if (r == 0.0) continue; // self-distance convention: coincident atoms excluded
            e += mu.w[i] * mu.w[j] * w0(r);
        }
    }
    return e;
}

double energy(const PotentialSpec& spec, const GridMeasure& mu) {
    mu.check();
    if (mu.dim > 2) throw parameter_error("grid energy: dim must be 1 or 2");
    return grid_pair_energy(spec, mu, mu.values, mu.values);
}

double energy_cross(const PotentialSpec& spec, const GridMeasure& mu, const GridMeasure& nu) {
    mu.check();
    nu.check();
    if (mu.dim != nu.dim || mu.extents != nu.extents || mu.h != nu.h || mu.origin != nu.origin)
        throw parameter_error("energy_cross: grids must share geometry");
    if (mu.dim > 2) throw parameter_error("energy_cross: dim must be 1 or 2");
    return grid_pair_energy(spec, mu, mu.values, nu.values);
}

namespace {

template <typename SourceAt>
FieldSamples field_impl(const PotentialSpec& spec, int dim, std::size_t n_src, SourceAt&& src,
                        const std::vector<double>& points, int order, double self_radius,
                        double diag_value) {
    if (order < 0 || order > 2) throw domain_error("field: order must be 0, 1, or 2");
    std::size_t npts = points.size() / dim;
    FieldSamples out;
    out.order = order;
    out.dim = dim;
    out.values.assign(order == 1 ? npts * dim : npts, 0.0);
    auto w = make_kernel(spec, order == 0 ? 0 : 1);
    std::function<double(double)> w2;
    if (order == 2) w2 = make_kernel(spec, 2);
    parallel_for(0, npts, [&](std::size_t p) {
        const double* x = points.data() + p * dim;
        for (std::size_t j = 0; j < n_src; ++j) {
            auto [y, m] = src(j);
            double r = dist(x, y, dim);
            if (r <= self_radius) {
                // overlapping the source cell/atom: only the potential itself
                // has a finite cell-averaged stand-in
                if (order == 0) out.values[p] += m * diag_value;
                continue;
            }
            switch (order) {
                case 0: out.values[p] += m * w(r); break;
                case 1:
                    for (int k = 0; k < dim; ++k)
                        out.values[p * dim + k] += m * w(r) * (x[k] - y[k]) / r;
                    break;
                default:
                    out.values[p] += m * (w2(r) + (dim - 1) * w(r) / r);
                    break;
            }
        }
    });
    return out;
}

} // namespace

FieldSamples field(const PotentialSpec& spec, const ParticleEnsemble& mu,
                   const std::vector<double>& points, int order) {
    mu.check();
    if (points.size() % mu.dim != 0) throw domain_error("field: points size mismatch");
    return field_impl(
        spec, mu.dim, mu.size(),
        [&](std::size_t j) { return std::pair<const double*, double>{mu.pos.data() + j * mu.dim, mu.w[j]}; },
        points, order, 0.0, 0.0);
}

FieldSamples field(const PotentialSpec& spec, const GridMeasure& mu,
                   const std::vector<double>& points, int order) {
    mu.check();
    if (points.size() % mu.dim != 0) throw domain_error("field: points size mismatch");
    double diag = 0.0;
    if (order == 0) {
        diag = cell_average_radial(make_kernel(spec, 0), mu.h, mu.dim);
        if (!std::isfinite(diag))
            throw singularity_error("field: kernel is not integrable over a cell");
    }
    // midpoints cached once; measures are immutable after construction
    std::vector<double> mids(mu.cell_count() * mu.dim);
    for (std::size_t j = 0; j < mu.cell_count(); ++j) {
        auto x = mu.midpoint(j);
        std::copy(x.begin(), x.end(), mids.begin() + j * mu.dim);
    }
    return field_impl(
        spec, mu.dim, mu.cell_count(),
        [&](std::size_t j) {
            return std::pair<const double*, double>{mids.data() + j * mu.dim, mu.values[j]};
        },
        points, order, 0.49 * mu.h, diag);
}

namespace {

struct SupportSamples {
    std::vector<double> points; // flat
    int dim;
    double h; // local spacing scale
};

SupportSamples support_of(const ParticleEnsemble& mu) {
    SupportSamples s;
    s.dim = mu.dim;
    s.points = mu.pos;
    // median nearest-neighbour distance as the spacing scale
    std::size_t n = mu.size();
    std::vector<double> nn(n, std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = i + 1; j < n; ++j) {
            double r = dist(mu.pos.data() + i * mu.dim, mu.pos.data() + j * mu.dim, mu.dim);
            nn[i] = std::min(nn[i], r);
            nn[j] = std::min(nn[j], r);
        }
    std::sort(nn.begin(), nn.end());
    s.h = n >= 2 ? nn[n / 2] : 1.0;
    return s;
}

SupportSamples support_of(const GridMeasure& mu, std::size_t cap = 4096) {
    SupportSamples s;
    s.dim = mu.dim;
    s.h = mu.h;
    double vmax = 0.0;
    for (double v : mu.values) vmax = std::max(vmax, std::abs(v));
    std::vector<std::size_t> idx;
    for (std::size_t j = 0; j < mu.values.size(); ++j)
        if (std::abs(mu.values[j]) > 1e-14 * vmax) idx.push_back(j);
    std::size_t stride = std::max<std::size_t>(1, idx.size() / cap);
    for (std::size_t q = 0; q < idx.size(); q += stride) {
        auto x = mu.midpoint(idx[q]);
        s.points.insert(s.points.end(), x.begin(), x.end());
    }
    return s;
}

template <typename Measure>
ElResidual el_residual_impl(const PotentialSpec& spec, const Measure& mu, double eps0) {
    SupportSamples sup = support_of(mu);
    const int dim = sup.dim;
    const std::size_t nsup = sup.points.size() / dim;
    if (nsup == 0) throw domain_error("el_residual: empty measure");

    FieldSamples g = field(spec, mu, sup.points, 1);
    double steady = 0.0;
    for (std::size_t i = 0; i < nsup; ++i) {
        double s = 0.0;
        for (int k = 0; k < dim; ++k) s += g.values[i * dim + k] * g.values[i * dim + k];
        steady = std::max(steady, std::sqrt(s));
    }

    // probe grid: support bounding box inflated by 25%, 64 points per axis,
    // minus a tube around the support samples
    std::vector<double> lo(dim, std::numeric_limits<double>::infinity());
    std::vector<double> hi(dim, -std::numeric_limits<double>::infinity());
    for (std::size_t i = 0; i < nsup; ++i)
        for (int k = 0; k < dim; ++k) {
            lo[k] = std::min(lo[k], sup.points[i * dim + k]);
            hi[k] = std::max(hi[k], sup.points[i * dim + k]);
        }
    const double band = (eps0 > 0.0) ? eps0 : 2.0 * sup.h;
    std::vector<double> probes;
    const int npd = 64;
    std::vector<int> ix(dim, 0);
    std::vector<double> x(dim);
    while (true) {
        for (int k = 0; k < dim; ++k) {
            double span = hi[k] - lo[k];
            double a = lo[k] - 0.25 * span, b = hi[k] + 0.25 * span;
            x[k] = a + (b - a) * (ix[k] + 0.5) / npd;
        }
        bool excluded = false;
        for (std::size_t i = 0; i < nsup && !excluded; ++i)
            if (dist(x.data(), sup.points.data() + i * dim, dim) < band) excluded = true;
        if (!excluded) probes.insert(probes.end(), x.begin(), x.end());
        int k = dim - 1;
        while (k >= 0 && ++ix[k] == npd) ix[k--] = 0;
        if (k < 0) break;
    }
    double e = energy(spec, mu);
    double c_rho = 2.0 * e;
    double vmin = std::numeric_limits<double>::infinity();
    if (!probes.empty()) {
        FieldSamples v = field(spec, mu, probes, 0);
        for (double val : v.values) vmin = std::min(vmin, val);
    }
    ElResidual r;
    r.steady_max = steady;
    r.d2_violation = probes.empty() ? 0.0 : std::max(0.0, c_rho - vmin);
    r.c_rho = c_rho;
    r.probe_band = band;
    r.probe_count = probes.size() / dim;
    return r;
}

} // namespace

ElResidual el_residual(const PotentialSpec& spec, const ParticleEnsemble& mu, double eps0) {
    mu.check();
    return el_residual_impl(spec, mu, eps0);
}

ElResidual el_residual(const PotentialSpec& spec, const GridMeasure& mu, double eps0) {
    mu.check();
    return el_residual_impl(spec, mu, eps0);
}

namespace {

double sphere_surface(int d) {
    // |S^{d-1}| = 2 pi^{d/2} / Gamma(d/2)
    return 2.0 * std::pow(M_PI, d / 2.0) / std::tgamma(d / 2.0);
}

// mass of rho(r) = amp * (R^2-r^2)^p [ + amp2 * (R^2-r^2)^{p+1} ] by the
// rim-regularizing substitution r = R sin t
double minimizer_mass(int d, double p, double R, double amp, double amp2, int n) {
    auto f = [&](double t) {
        double ct = std::cos(t), st = std::sin(t);
        double q = std::pow(R * ct, 2.0 * p);
        double profile = amp * q + amp2 * q * (R * ct) * (R * ct);
        return profile * std::pow(R * st, d - 1.0) * R * ct;
    };
    return sphere_surface(d) * gauss_integrate(f, 0.0, M_PI / 2.0, n);
}

} // namespace

double ExplicitMinimizer::density(double r) const {
    if (r >= radius) return 0.0;
    double q = radius * radius - r * r;
    double p = 1.0 - (b + d) / 2.0;
    if (a == 2.0) return amplitude * std::pow(q, p);
    return (amplitude * radius * radius + amplitude2 * q) * std::pow(q, p);
}

namespace {

// signed radial derivative of W * rho at radius s for a power-law kernel
double radial_vprime(const ExplicitMinimizer& em, double s, int n_r, int n_ang) {
    PowerLaw pl{em.a, em.b, em.d};
    auto wp = [&](double r) { return eval(PotentialSpec{pl}, r, 1); };
    const int d = em.d;
    const double R = em.radius;
    auto outer = [&](double t) {
        double r = R * std::sin(t);
        double rho = em.density(std::min(r, R * (1.0 - 1e-15)));
        double jac = std::pow(r, d - 1.0) * R * std::cos(t);
        if (d == 1) {
            // sources at +-r, dr = R cos t dt
            double up = 0.0;
            for (double y : {r, -r}) {
                double q = std::abs(s - y);
                if (q > 1e-14) up += wp(q) * ((s - y) > 0 ? 1.0 : -1.0);
            }
            return rho * up * R * std::cos(t);
        }
        auto ang = [&](double th) {
            double cq = std::cos(th);
            double q = std::sqrt(std::max(s * s + r * r - 2.0 * s * r * cq, 0.0));
            if (q < 1e-14) return 0.0;
            double geom = (d == 2) ? 1.0 : std::pow(std::sin(th), d - 2.0);
            return wp(q) * (s - r * cq) / q * geom;
        };
        double angular = gauss_integrate(ang, 0.0, M_PI, n_ang);
        double s_norm = (d == 2) ? 2.0 : 2.0 * M_PI; // |S^{d-2}|
        return rho * jac * angular * s_norm;
    };
    return gauss_integrate(outer, 0.0, M_PI / 2.0, n_r);
}

} // namespace

ExplicitMinimizer explicit_minimizer(int d, double a, double b) {
    if (d < 1) throw parameter_error("explicit_minimizer: dimension must be positive");
    double p = 1.0 - (b + d) / 2.0;
    if (a == 2.0) {
        if (!(b > 2.0 - d && b < std::min(4.0 - d, 2.0)))
            throw parameter_error("explicit_minimizer: a=2 requires 2-d < b < min(4-d, 2)");
        double A = -d * std::tgamma(d / 2.0) * std::sin((b + d) * M_PI / 2.0) /
                   ((b + d - 2.0) * std::pow(M_PI, d / 2.0 + 1.0));
        // unit mass by bisection on the monotone quadrature mass
        auto mass = [&](double R) { return minimizer_mass(d, p, R, A, 0.0, 512); };
        double lo = 1e-6, hi = 1.0;
        while (mass(hi) < 1.0) hi *= 2.0;
        while (mass(lo) > 1.0) lo *= 0.5;
        for (int it = 0; it < 200; ++it) {
            double mid = 0.5 * (lo + hi);
            (mass(mid) < 1.0 ? lo : hi) = mid;
            if (hi - lo < 1e-14 * hi) break;
        }
        double R = 0.5 * (lo + hi);
        ExplicitMinimizer em{d, a, b, R, A, 0.0, mass(R)};
        return em;
    }
    if (a == 4.0) {
        double bbar = (2.0 + 2.0 * d - d * d) / (d + 1.0);
        if (!(b > 2.0 - d && b < bbar))
            throw parameter_error("explicit_minimizer: a=4 requires 2-d < b < (2+2d-d^2)/(d+1)");
        // For fixed R the two collocation conditions V'(r_i) = 0 are linear and
        // homogeneous in (A1, A2); R is the root of the 2x2 determinant, then
        // (A1, A2) is the null direction scaled to unit mass.
        auto det = [&](double R) {
            ExplicitMinimizer e1{d, a, b, R, 1.0, 0.0, 0.0};
            ExplicitMinimizer e2{d, a, b, R, 0.0, 1.0, 0.0};
            double g11 = radial_vprime(e1, 0.35 * R, 192, 192);
            double g12 = radial_vprime(e2, 0.35 * R, 192, 192);
            double g21 = radial_vprime(e1, 0.70 * R, 192, 192);
            double g22 = radial_vprime(e2, 0.70 * R, 192, 192);
            return std::array<double, 4>{g11, g12, g21, g22};
        };
        auto detval = [&](double R) {
            auto m = det(R);
            return m[0] * m[3] - m[1] * m[2];
        };
        // bracket the sign change of the determinant
        double lo = 0.05, hi = 0.0, prev = detval(lo);
        for (double R = 0.1; R <= 6.0; R += 0.05) {
            double v = detval(R);
            if (v == 0.0 || (v > 0) != (prev > 0)) {
                hi = R;
                break;
            }
            lo = R;
            prev = v;
        }
        if (hi == 0.0) throw parameter_error("explicit_minimizer: no steady radius bracket found");
        for (int it = 0; it < 80; ++it) {
            double mid = 0.5 * (lo + hi);
            double v = detval(mid);
            if ((v > 0) == (prev > 0))
                lo = mid;
            else
                hi = mid;
        }
        double R = 0.5 * (lo + hi);
        auto m = det(R);
        // null vector of the (near-singular) matrix: pick the larger row
        double A1, A2;
        if (std::abs(m[0]) + std::abs(m[1]) >= std::abs(m[2]) + std::abs(m[3])) {
            A1 = -m[1];
            A2 = m[0];
        } else {
            A1 = -m[3];
            A2 = m[2];
        }
        double mass = minimizer_mass(d, p, R, A1 * R * R, A2, 768);
        A1 /= mass;
        A2 /= mass;
        ExplicitMinimizer em{d, a, b, R, A1, A2,
                             minimizer_mass(d, p, R, A1 * R * R, A2, 768)};
        if (em.density(0.0) < 0.0 || em.density(0.999 * R) < 0.0)
            throw parameter_error("explicit_minimizer: negative profile at the steady radius");
        return em;
    }
    throw parameter_error("explicit_minimizer: attractive exponent must be 2 or 4");
}

double minimizer_radial_residual(const ExplicitMinimizer& em, double s, int n_r, int n_ang) {
    return std::abs(radial_vprime(em, s, n_r, n_ang));
}

GridMeasure minimizer_to_grid(const ExplicitMinimizer& em, int cells_per_side) {
    if (em.d != 2) throw parameter_error("minimizer_to_grid: only d = 2");
    const double R = em.radius;
    GridMeasure g;
    g.dim = 2;
    g.h = 2.0 * R / cells_per_side;
    g.origin = {-R, -R};
    g.extents = {cells_per_side, cells_per_side};
    g.values.assign(g.cell_count(), 0.0);
    // exact annulus masses deposited by sector centroid; placement error is
    // O(patch size), total mass error 0
    double p = 1.0 - (em.b + em.d) / 2.0;
    auto cdf = [&](double r) {
        // closed-form radial mass integral in 2D
        double q = std::max(R * R - r * r, 0.0);
        double head = -M_PI * std::pow(q, p + 1.0) / (p + 1.0);
        if (em.a == 2.0) return em.amplitude * (head - (-M_PI * std::pow(R * R, p + 1.0) / (p + 1.0)));
        double head2 = -M_PI * std::pow(q, p + 2.0) / (p + 2.0);
        double at0 = -M_PI * std::pow(R * R, p + 1.0) / (p + 1.0);
        double at02 = -M_PI * std::pow(R * R, p + 2.0) / (p + 2.0);
        return em.amplitude * R * R * (head - at0) + em.amplitude2 * (head2 - at02);
    };
    int n_r = 6 * cells_per_side, n_t = 8 * cells_per_side;
    for (int i = 0; i < n_r; ++i) {
        double r0 = R * i / n_r, r1 = R * (i + 1) / n_r;
        double ring_mass = cdf(r1) - cdf(r0);
        double rmid = 0.5 * (r0 + r1);
        double sector = ring_mass / n_t;
        for (int j = 0; j < n_t; ++j) {
            double th = 2.0 * M_PI * (j + 0.5) / n_t;
            double x = rmid * std::cos(th), y = rmid * std::sin(th);
            int cx = static_cast<int>((x - g.origin[0]) / g.h);
            int cy = static_cast<int>((y - g.origin[1]) / g.h);
            cx = std::clamp(cx, 0, cells_per_side - 1);
            cy = std::clamp(cy, 0, cells_per_side - 1);
            g.values[static_cast<std::size_t>(cx) * cells_per_side + cy] += sector;
        }
    }
    return g;
}

namespace {

// second antiderivative of -|x|^b / b (b > 0) or -ln|x| (b = 0); even
double appendix_f2(double x, double b) {
    double ax = std::abs(x);
    if (b == 0.0) {
        if (ax == 0.0) return 0.0;
        return -(x * x / 2.0 * std::log(ax) - 0.75 * x * x);
    }
    return -std::pow(ax, b + 2.0) / (b * (b + 1.0) * (b + 2.0));
}

} // namespace

AppendixIdentity appendix_identity_check(double b, const GridMeasure& mu) {
    mu.check();
    if (mu.dim != 1) throw domain_error("appendix_identity_check: measure must be 1D");
    if (!(b >= 0.0 && b < 1.0)) throw domain_error("appendix_identity_check: b must lie in [0,1)");
    double tv = mu.total_variation();
    if (tv == 0.0) throw domain_error("appendix_identity_check: zero measure");
    if (std::abs(mu.total_mass()) > 1e-10 * tv)
        throw domain_error("appendix_identity_check: measure must be mean-zero");

    // lhs: exact energy of the piecewise-constant density the grid represents;
    // the double cell average of the kernel is the second difference of F2
    const double h = mu.h;
    const int n = mu.extents[0];
    std::vector<double> wbar(n, 0.0);
    for (int dlt = 0; dlt < n; ++dlt) {
        double s = dlt * h;
        wbar[dlt] = (appendix_f2(s + h, b) - 2.0 * appendix_f2(s, b) + appendix_f2(s - h, b)) /
                    (h * h);
    }
    double lhs = 0.0;
    for (int i = 0; i < n; ++i) {
        if (mu.values[i] == 0.0) continue;
        for (int j = 0; j < n; ++j) lhs += mu.values[i] * mu.values[j] * wbar[std::abs(i - j)];
    }

    // rhs: dyadic panels down from xi_max = 32 pi / h, 1024-node Gauss per
    // panel, 64 panels (2^16 nodes); one sinc factor converts midpoint atoms
    // to the piecewise-constant density transform
    const double xi_max = 32.0 * M_PI / h;
    const int nodes_per_panel = 1024, panels = 64;
    const GaussRule& gr = gauss_legendre(nodes_per_panel);
    std::vector<double> cells(n);
    for (int i = 0; i < n; ++i) cells[i] = mu.origin[0] + (i + 0.5) * h;
    double rhs = 0.0;
    double hi = xi_max;
    for (int pan = 0; pan < panels; ++pan) {
        double lo = hi / 2.0;
        double mid = 0.5 * (lo + hi), half = 0.5 * (hi - lo);
        double acc = 0.0;
        for (int q = 0; q < nodes_per_panel; ++q) {
            double xi = mid + half * gr.x[q];
            double re = 0.0, im = 0.0;
            for (int i = 0; i < n; ++i) {
                re += mu.values[i] * std::cos(xi * cells[i]);
                im -= mu.values[i] * std::sin(xi * cells[i]);
            }
            double u = 0.5 * xi * h;
            double snc = std::sin(u) / u;
            acc += gr.w[q] * std::pow(xi, -b - 1.0) * (re * re + im * im) * snc * snc;
        }
        rhs += acc * half;
        hi = lo;
    }
    rhs *= 2.0; // even integrand
    if (!(lhs > 0.0))
        throw domain_error("appendix_identity_check: energy not positive (degenerate input?)");
    return AppendixIdentity{lhs, rhs, lhs / rhs, xi_max};
}

} // namespace aggmin
