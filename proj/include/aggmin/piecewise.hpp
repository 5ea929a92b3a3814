#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace aggmin {

// Cubic in local coordinates: p(u) = c[0] + c[1]u + c[2]u^2 + c[3]u^3.
struct Poly4 {
    std::array<double, 4> c{0.0, 0.0, 0.0, 0.0};

    double eval(double u) const { return ((c[3] * u + c[2]) * u + c[1]) * u + c[0]; }
    Poly4 derivative() const { return Poly4{{c[1], 2.0 * c[2], 3.0 * c[3], 0.0}}; }
    // antiderivative with value `v0` at u = 0; requires degree <= 2
    Poly4 antiderivative(double v0) const;
    // same polynomial re-expanded around u = t, i.e. q(v) = p(t + v)
    Poly4 shifted(double t) const {
        Poly4 q;
        q.c[0] = eval(t);
        q.c[1] = c[1] + 2.0 * c[2] * t + 3.0 * c[3] * t * t;
        q.c[2] = c[2] + 3.0 * c[3] * t;
        q.c[3] = c[3];
        return q;
    }
    Poly4& add_scaled(const Poly4& p, double s) {
        for (int i = 0; i < 4; ++i) c[i] += s * p.c[i];
        return *this;
    }
    Poly4 negated() const { return Poly4{{-c[0], -c[1], -c[2], -c[3]}}; }
};

// Piecewise polynomial on the whole line.  breaks are sorted; segment i covers
// [breaks[i-1], breaks[i]) for 1 <= i < nseg, segment 0 is (-inf, breaks[0])
// and the last segment is [breaks.back(), +inf).  Each segment's polynomial is
// stored in LOCAL coordinates u = x - origin(i), origin(0) = breaks[0] and
// origin(i) = breaks[i-1] otherwise; this keeps coefficient magnitudes at the
// scale of the function values even when slopes reach M^k.
class PiecewisePoly {
public:
    PiecewisePoly() = default;
    PiecewisePoly(std::vector<double> breaks, std::vector<Poly4> segs);

    std::size_t segment_count() const { return segs_.size(); }
    const std::vector<double>& breaks() const { return breaks_; }
    const Poly4& segment(std::size_t i) const { return segs_[i]; }
    double origin(std::size_t i) const { return i == 0 ? breaks_.front() : breaks_[i - 1]; }
    // segment index containing x (right-continuous everywhere)
    std::size_t locate(double x) const;

    double eval(double x) const;
    double eval_derivative(double x) const;

    PiecewisePoly derivative() const;
    // antiderivative, continuous, anchored to the given value at x = anchor
    PiecewisePoly antiderivative(double anchor = 0.0, double value_at_anchor = 0.0) const;

    // max over [a, b] of |p(x)| (endpoints, breakpoints, interior critical points)
    double max_abs_on(double a, double b) const;

    // coalesce breakpoints closer than tol (keeps the left polynomial)
    void coalesce(double tol);

private:
    std::vector<double> breaks_;
    std::vector<Poly4> segs_;
};

// Odd/even reflection of a half-line description given on [0, inf).
// half_breaks must start with 0; half_segs[i] covers [half_breaks[i], next).
PiecewisePoly reflect_odd(const std::vector<double>& half_breaks, const std::vector<Poly4>& half_segs);
PiecewisePoly reflect_even(const std::vector<double>& half_breaks, const std::vector<Poly4>& half_segs);

// Exact convolution (G-based): given G with G' = f, returns
//   sum_l height * [ G(x - a_l) - G(x - b_l) ]
// which equals (f * rho)(x) for rho = height * sum_l chi_[a_l, b_l].
// Degree of the result equals the degree of G.
PiecewisePoly convolve_antiderivative(const PiecewisePoly& G,
                                      const std::vector<std::pair<double, double>>& intervals,
                                      double height, double coalesce_tol = 1e-14);

} // namespace aggmin
