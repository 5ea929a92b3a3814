#include "aggmin/piecewise.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace aggmin {

Poly4 Poly4::antiderivative(double v0) const {
    if (c[3] != 0.0)
        throw std::invalid_argument("Poly4::antiderivative: cubic input would exceed degree 3");
    return Poly4{{v0, c[0], c[1] / 2.0, c[2] / 3.0}};
}

PiecewisePoly::PiecewisePoly(std::vector<double> breaks, std::vector<Poly4> segs)
    : breaks_(std::move(breaks)), segs_(std::move(segs)) {
    if (breaks_.empty() || segs_.size() != breaks_.size() + 1)
        throw std::invalid_argument("PiecewisePoly: need n breaks and n+1 segments");
    if (!std::is_sorted(breaks_.begin(), breaks_.end()))
        throw std::invalid_argument("PiecewisePoly: breaks not sorted");
}

std::size_t PiecewisePoly::locate(double x) const {
    return static_cast<std::size_t>(
        std::upper_bound(breaks_.begin(), breaks_.end(), x) - breaks_.begin());
}

double PiecewisePoly::eval(double x) const {
    std::size_t i = locate(x);
    return segs_[i].eval(x - origin(i));
}

double PiecewisePoly::eval_derivative(double x) const {
    std::size_t i = locate(x);
    return segs_[i].derivative().eval(x - origin(i));
}

PiecewisePoly PiecewisePoly::derivative() const {
    std::vector<Poly4> d(segs_.size());
    for (std::size_t i = 0; i < segs_.size(); ++i) d[i] = segs_[i].derivative();
    return PiecewisePoly(breaks_, std::move(d));
}

PiecewisePoly PiecewisePoly::antiderivative(double anchor, double value_at_anchor) const {
    std::vector<Poly4> anti(segs_.size());
    // first pass: per-segment antiderivative with 0 at its own origin
    for (std::size_t i = 0; i < segs_.size(); ++i) anti[i] = segs_[i].antiderivative(0.0);
    // accumulate continuity constants left to right starting from segment 1
    std::vector<double> c(segs_.size(), 0.0);
    for (std::size_t i = 2; i < segs_.size(); ++i) {
        double len = breaks_[i - 1] - breaks_[i - 2];
        c[i] = c[i - 1] + anti[i - 1].eval(len);
    }
    // segment 0 extends to the left of breaks_[0] and shares its origin with segment 1
    c[0] = c[1];
    for (std::size_t i = 0; i < segs_.size(); ++i) anti[i].c[0] += c[i];
    PiecewisePoly F(breaks_, std::move(anti));
    double shift = value_at_anchor - F.eval(anchor);
    for (auto& s : F.segs_) s.c[0] += shift;
    return F;
}

double PiecewisePoly::max_abs_on(double a, double b) const {
    if (b < a) std::swap(a, b);
    double best = 0.0;
    auto consider = [&](double x) {
        double v = std::abs(eval(x));
        if (v > best) best = v;
    };
    consider(a);
    consider(b);
    std::size_t ia = locate(a), ib = locate(b);
    for (std::size_t i = ia; i <= ib; ++i) {
        double lo = (i == 0) ? a : std::max(a, breaks_[i - 1]);
        double hi = (i < breaks_.size()) ? std::min(b, breaks_[i]) : b;
        if (hi < lo) continue;
        if (i > 0 && breaks_[i - 1] >= a && breaks_[i - 1] <= b) consider(breaks_[i - 1]);
        // interior critical points of the cubic
        const Poly4& p = segs_[i];
        double o = origin(i);
        double qa = 3.0 * p.c[3], qb = 2.0 * p.c[2], qc = p.c[1];
        if (qa == 0.0) {
            if (qb != 0.0) {
                double u = -qc / qb;
                double x = o + u;
                if (x > lo && x < hi) consider(x);
            }
        } else {
            double disc = qb * qb - 4.0 * qa * qc;
            if (disc >= 0.0) {
                double sq = std::sqrt(disc);
                for (double u : {(-qb + sq) / (2.0 * qa), (-qb - sq) / (2.0 * qa)}) {
                    double x = o + u;
                    if (x > lo && x < hi) consider(x);
                }
            }
        }
    }
    return best;
}

void PiecewisePoly::coalesce(double tol) {
    if (breaks_.size() < 2) return;
    std::vector<double> nb;
    std::vector<Poly4> ns;
    nb.push_back(breaks_[0]);
    ns.push_back(segs_[0]);
    std::size_t j = 0;
    while (true) {
        // absorb every original break within tol of the kept one
        std::size_t k = j;
        while (k + 1 < breaks_.size() && breaks_[k + 1] - nb.back() <= tol) ++k;
        // the polynomial valid on the bulk right of the kept break is segs_[k+1];
        // re-expand it around the kept break (shift is at most a few tol)
        ns.push_back(segs_[k + 1].shifted(nb.back() - breaks_[k]));
        if (k + 1 >= breaks_.size()) break;
        nb.push_back(breaks_[k + 1]);
        j = k + 1;
    }
    breaks_ = std::move(nb);
    segs_ = std::move(ns);
}

PiecewisePoly reflect_odd(const std::vector<double>& hb, const std::vector<Poly4>& hs) {
    if (hb.empty() || hb.front() != 0.0 || hs.size() != hb.size())
        throw std::invalid_argument("reflect_odd: half description must start at 0");
    // p(-x) = -p(x): mirror segment on [-b_{i+1}, -b_i] with origin -b_{i+1}.
    // q(u) = -p((b_{i+1} - b_i) - u) expanded around the mirrored left endpoint.
    std::size_t n = hb.size();
    std::vector<double> breaks;
    std::vector<Poly4> segs;
    // mirrored side, outermost first; the unbounded right segment mirrors to the
    // unbounded left segment with origin -hb.back().
    for (std::size_t i = n; i-- > 0;) {
        double len = (i + 1 < n) ? hb[i + 1] - hb[i] : 0.0;
        const Poly4& p = hs[i];
        Poly4 q;
        if (i + 1 < n) {
            // finite mirror: q(u) = -p(len - u)
            Poly4 s = p.shifted(len); // s(v) = p(len + v)
            q = Poly4{{-s.c[0], s.c[1], -s.c[2], s.c[3]}};
            breaks.push_back(-hb[i + 1]);
        } else {
            // unbounded: q(u) = -p(-u) around origin -hb.back() ... origin matches break
            q = Poly4{{-p.c[0], p.c[1], -p.c[2], p.c[3]}};
        }
        segs.push_back(q);
    }
    for (std::size_t i = 0; i < n; ++i) {
        breaks.push_back(hb[i]);
        segs.push_back(hs[i]);
    }
    return PiecewisePoly(std::move(breaks), std::move(segs));
}

PiecewisePoly reflect_even(const std::vector<double>& hb, const std::vector<Poly4>& hs) {
    if (hb.empty() || hb.front() != 0.0 || hs.size() != hb.size())
        throw std::invalid_argument("reflect_even: half description must start at 0");
    std::size_t n = hb.size();
    std::vector<double> breaks;
    std::vector<Poly4> segs;
    for (std::size_t i = n; i-- > 0;) {
        double len = (i + 1 < n) ? hb[i + 1] - hb[i] : 0.0;
        const Poly4& p = hs[i];
        Poly4 q;
        if (i + 1 < n) {
            Poly4 s = p.shifted(len);
            q = Poly4{{s.c[0], -s.c[1], s.c[2], -s.c[3]}};
            breaks.push_back(-hb[i + 1]);
        } else {
            q = Poly4{{p.c[0], -p.c[1], p.c[2], -p.c[3]}};
        }
        segs.push_back(q);
    }
    for (std::size_t i = 0; i < n; ++i) {
        breaks.push_back(hb[i]);
        segs.push_back(hs[i]);
    }
    return PiecewisePoly(std::move(breaks), std::move(segs));
}

PiecewisePoly convolve_antiderivative(const PiecewisePoly& G,
                                      const std::vector<std::pair<double, double>>& intervals,
                                      double height, double coalesce_tol) {
    // terms: +height * G(x - a_l), -height * G(x - b_l)
    struct Term {
        double shift;
        double sign;
    };
    std::vector<Term> terms;
    terms.reserve(2 * intervals.size());
    for (const auto& [a, b] : intervals) {
        terms.push_back({a, +1.0});
        terms.push_back({b, -1.0});
    }

    std::vector<double> breaks;
    breaks.reserve(terms.size() * G.breaks().size());
    for (const Term& t : terms)
        for (double g : G.breaks()) breaks.push_back(g + t.shift);
    std::sort(breaks.begin(), breaks.end());
    // coalesce nearly identical breakpoints coming from different shifts
    std::vector<double> ub;
    for (double x : breaks)
        if (ub.empty() || x - ub.back() > coalesce_tol) ub.push_back(x);

    std::vector<Poly4> segs(ub.size() + 1);
    // Kahan-compensated accumulation of the four coefficients per segment.
    for (std::size_t i = 0; i < segs.size(); ++i) {
        double o = (i == 0) ? ub.front() : ub[i - 1];
        // sample point identifying the source segment: the segment's left origin,
        // nudged right for interior segments so locate() lands inside
        double probe;
        if (i == 0)
            probe = ub.front() - 1.0;
        else if (i < ub.size())
            probe = 0.5 * (ub[i - 1] + ub[i]);
        else
            probe = ub.back() + (ub.size() > 1 ? 0.5 * (ub.back() - ub.front()) / ub.size() : 1.0);
        std::array<double, 4> sum{0, 0, 0, 0}, comp{0, 0, 0, 0};
        for (const Term& t : terms) {
            double y = probe - t.shift;
            std::size_t gi = G.locate(y);
            // re-expand the source polynomial around (o - t.shift)
            Poly4 p = G.segment(gi).shifted(o - t.shift - G.origin(gi));
            double s = t.sign * height;
            for (int c = 0; c < 4; ++c) {
                double val = s * p.c[c] - comp[c];
                double tmp = sum[c] + val;
                comp[c] = (tmp - sum[c]) - val;
                sum[c] = tmp;
            }
        }
        segs[i].c = sum;
    }
    return PiecewisePoly(std::move(ub), std::move(segs));
}

} // namespace aggmin
