#include "aggmin/cantor.hpp"

#include <algorithm>
#include <cmath>

#include "aggmin/errors.hpp"

namespace aggmin {

void validate_cantor_params(double m_ratio, double alpha, int level) {
    if (!(m_ratio > 3.0)) throw parameter_error("cantor kernel: M must exceed 3");
    if (!(alpha > 2.0 && alpha <= m_ratio - 1.0))
        throw parameter_error("cantor kernel: alpha must lie in (2, M-1]");
    if (level < 0) throw parameter_error("cantor kernel: level must be >= 0");
    if (level > 40) throw parameter_error("cantor kernel: level capped at 40");
}

PiecewisePoly cantor_kernel_derivative(double M, double alpha, int level) {
    validate_cantor_params(M, alpha, level);
    const int k = level;
    // connector omega_k on (0, inf): value at breakpoints, linear between.
    // Breakpoint ladder per scale j: (M-alpha)_(j), (M-2)_(j), M_(j), plus the
    // zone boundary 1_(j).  All a_(j) = a M^{-j}.
    struct Node {
        double x;
        double omega;
    };
    std::vector<Node> nodes;
    nodes.push_back({0.0, 0.0});
    auto mj = [&](int j) { return std::pow(M, -j); };
    if (k >= 1) {
        nodes.push_back({1.0 * mj(k), 0.0}); // zone boundary, connector still zero
        nodes.push_back({(M - alpha) * mj(k), 0.0});
        nodes.push_back({(M - 2.0) * mj(k), -1.5});
        for (int j = k; j >= 1; --j) {
            nodes.push_back({M * mj(j), 0.5}); // end of the steady band at scale j
            if (j >= 2) {
                nodes.push_back({(M - alpha) * mj(j - 1), 0.5});
                nodes.push_back({(M - 2.0) * mj(j - 1), -1.5});
            }
        }
    }
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.x < b.x; });
    // drop exact duplicates (M_(j) coincides with 1_(j-1))
    std::vector<Node> uniq;
    for (const Node& n : nodes)
        if (uniq.empty() || n.x > uniq.back().x) uniq.push_back(n);

    const double base_c = M / (2.0 * M - 4.0);
    std::vector<double> hb;
    std::vector<Poly4> hs;
    for (std::size_t i = 0; i < uniq.size(); ++i) {
        hb.push_back(uniq[i].x);
        double slope;
        double v0 = uniq[i].omega;
        if (i + 1 < uniq.size()) {
            slope = (uniq[i + 1].omega - uniq[i].omega) / (uniq[i + 1].x - uniq[i].x);
        } else {
            slope = 0.0; // omega = 1/2 beyond x = 1 (or identically 0 at level 0)
        }
        // total W_k' = base (-1 + 2x) * M/(2M-4) + omega
        Poly4 p;
        p.c[0] = base_c * (-1.0 + 2.0 * uniq[i].x) + v0;
        p.c[1] = base_c * 2.0 + slope;
        hs.push_back(p);
    }
    return reflect_odd(hb, hs);
}

PiecewisePoly cantor_kernel(double M, double alpha, int level) {
    return cantor_kernel_derivative(M, alpha, level).antiderivative(0.0, 0.0);
}

PiecewisePoly exact_convolve(const PiecewisePoly& kernel, const CantorIterate& rho) {
    // (f * rho)(x) = height * sum_l [ F(x - a_l) - F(x - b_l) ], F' = f
    std::size_t terms = 2 * rho.intervals.size();
    std::size_t est = terms * (kernel.breaks().size() + 1);
    if (est > 2'000'000)
        throw parameter_error("exact_convolve: breakpoint budget exceeded");
    PiecewisePoly F = kernel.antiderivative(0.0, 0.0);
    return convolve_antiderivative(F, rho.interval_pairs(), rho.height, 1e-14);
}

namespace {

// (W_k'' * rho)(x) as the shifted sum  height * sum_l [W_k'(x-a_l) - W_k'(x-b_l)].
// The sgn jump of W_k' at 0 carries the delta atom of W_k'' exactly, so on every
// support interval the whole expression must cancel to the zero polynomial.
double second_derivative_residual(const PiecewisePoly& wk_prime, const CantorIterate& rho) {
    PiecewisePoly conv = convolve_antiderivative(wk_prime, rho.interval_pairs(), rho.height, 1e-14);
    double worst = 0.0;
    for (const auto& iv : rho.intervals) {
        std::size_t i = conv.locate(iv.a + 1e-13 * (iv.b - iv.a));
        for (; i <= conv.breaks().size(); ++i) {
            double lo = (i == 0) ? iv.a : std::max(iv.a, conv.breaks()[i - 1]);
            double hi = (i < conv.breaks().size()) ? std::min(iv.b, conv.breaks()[i]) : iv.b;
            if (lo >= iv.b) break;
            const Poly4& p = conv.segment(i);
            double mid = 0.5 * (lo + hi);
            worst = std::max(worst, std::abs(p.eval(mid - conv.origin(i))));
            worst = std::max(worst, std::abs(p.c[1]) * (hi - lo));
        }
    }
    return worst;
}

bool gate_prop_m(double M, double alpha) {
    return alpha > (M + 2.0) / 3.0 && alpha <= 2.0 * (M - 10.0) / 5.0;
}

} // namespace

CantorVerification verify_steady(double M, double alpha, int level) {
    validate_cantor_params(M, alpha, level);
    CantorVerification v;
    v.m_ratio = M;
    v.alpha = alpha;
    v.level = level;
    v.gate_prop_m = gate_prop_m(M, alpha);
    CantorIterate rho = cantor_iterate(M, level);
    PiecewisePoly wp = cantor_kernel_derivative(M, alpha, level);
    PiecewisePoly conv = exact_convolve(wp, rho);
    double worst = 0.0;
    for (const auto& iv : rho.intervals) worst = std::max(worst, conv.max_abs_on(iv.a, iv.b));
    v.steady_residual = worst;
    v.second_deriv_residual = second_derivative_residual(wp, rho);
    PiecewisePoly V = exact_convolve(cantor_kernel(M, alpha, level), rho);
    v.plateau = V.eval(0.0);
    v.plateau_mismatch = std::abs(V.eval(0.0) - V.eval(1.0));
    v.pass = v.steady_residual <= 1e-10;
    return v;
}

CantorVerification verify_margin(double M, double alpha, int level,
                                 const std::vector<double>& probes) {
    validate_cantor_params(M, alpha, level);
    CantorVerification v;
    v.m_ratio = M;
    v.alpha = alpha;
    v.level = level;
    v.gate_prop_m = gate_prop_m(M, alpha);
    CantorIterate rho = cantor_iterate(M, level);
    PiecewisePoly V = exact_convolve(cantor_kernel(M, alpha, level), rho);
    v.plateau = V.eval(0.0);
    v.plateau_mismatch = std::abs(V.eval(0.0) - V.eval(1.0));
    bool all_positive = true;
    for (double x0 : probes) {
        if (rho.contains(x0))
            throw probe_on_support_error("verify_margin: probe lies on supp rho_k");
        double m = V.eval(x0) - v.plateau;
        if (!(m > 0.0)) all_positive = false;
        v.margins.push_back({x0, m});
    }
    v.pass = all_positive;
    return v;
}

double self_similarity_check(double M, double alpha, int level) {
    validate_cantor_params(M, alpha, level);
    if (level < 1) throw parameter_error("self_similarity_check: level must be >= 1");
    PiecewisePoly Vk = potential_profile(M, alpha, level);
    PiecewisePoly Vk1 = potential_profile(M, alpha, level - 1);
    double vk0 = Vk.eval(0.0), vk10 = Vk1.eval(0.0);
    // sample densely plus at every breakpoint of V_k inside [0, 1/M]
    std::vector<double> xs;
    for (double b : Vk.breaks())
        if (b >= 0.0 && b <= 1.0 / M) xs.push_back(b);
    for (int i = 0; i <= 512; ++i) xs.push_back(i / (512.0 * M));
    double worst = 0.0;
    for (double x : xs) {
        double lhs = Vk.eval(x) - vk0;
        double rhs = (Vk1.eval(M * x) - vk10) / (2.0 * M);
        worst = std::max(worst, std::abs(lhs - rhs));
    }
    return worst;
}

PiecewisePoly potential_profile(double M, double alpha, int level) {
    return exact_convolve(cantor_kernel(M, alpha, level), cantor_iterate(M, level));
}

nlohmann::json to_json(const CantorVerification& v) {
    nlohmann::json margins = nlohmann::json::array();
    for (const auto& m : v.margins) margins.push_back({{"x0", m.x0}, {"margin", m.margin}});
    return nlohmann::json{{"m_ratio", v.m_ratio},
                          {"alpha", v.alpha},
                          {"level", v.level},
                          {"plateau", v.plateau},
                          {"plateau_mismatch", v.plateau_mismatch},
                          {"steady_residual", v.steady_residual},
                          {"second_deriv_residual", v.second_deriv_residual},
                          {"margins", margins},
                          {"gate_prop_m", v.gate_prop_m},
                          {"pass", v.pass}};
}

} // namespace aggmin
