#include "aggmin/potential.hpp"

#include <cmath>
#include <limits>

#include "aggmin/cantor_kernel.hpp"
#include "aggmin/errors.hpp"

namespace aggmin {

namespace {

// |r|^p / p with the |r|^0/0 := ln r convention; order 1 and 2 are uniform
// across the convention since d/dr ln r = r^{p-1} at p = 0.
double power_term(double p, double r, int order) {
    switch (order) {
        case 0: return (p == 0.0) ? std::log(r) : std::pow(r, p) / p;
        case 1: return std::pow(r, p - 1.0);
        default: return (p - 1.0) * std::pow(r, p - 2.0);
    }
}

double riesz_term(const RieszConstant& c, double r, int order) {
    if (c.log_branch) {
        switch (order) {
            case 0: return c.value * std::log(r);
            case 1: return c.value / r;
            default: return -c.value / (r * r);
        }
    }
    double p = c.alpha - c.d;
    switch (order) {
        case 0: return c.value * std::pow(r, p);
        case 1: return c.value * p * std::pow(r, p - 1.0);
        default: return c.value * p * (p - 1.0) * std::pow(r, p - 2.0);
    }
}

// the Gaussian ladder sum for a given derivative order; terms with a dead
// exponential (argument beyond underflow) are skipped
double ladder_sum(const HierGauss& hg, double r, int order) {
    double s = 0.0;
    double pd = hg.alpha - hg.d;
    for (int k = 1; k <= hg.k_trunc; ++k) {
        double lk = std::pow(hg.lambda, k);
        double t = r * r / (2.0 * lk * lk);
        if (t > 745.0) continue;
        double e = std::exp(-t);
        switch (order) {
            case 0: s += -hg.c_w * std::pow(hg.lambda, pd * k) * e; break;
            case 1: s += hg.c_w * std::pow(hg.lambda, (pd - 2.0) * k) * r * e; break;
            default:
                s += hg.c_w * std::pow(hg.lambda, (pd - 2.0) * k) * (1.0 - r * r / (lk * lk)) * e;
                break;
        }
    }
    return s;
}

double quad_term(double c2, double r, int order) {
    switch (order) {
        case 0: return 0.5 * c2 * r * r;
        case 1: return c2 * r;
        default: return c2;
    }
}

} // namespace

RieszConstant riesz_constant(int d, double alpha) {
    if (d < 1) throw parameter_error("riesz_constant: dimension must be positive");
    if (!(alpha > 0.0 && alpha < d + 2.0))
        throw parameter_error("riesz_constant: alpha must lie in (0, d+2)");
    double denom = std::pow(M_PI, d / 2.0) * std::pow(2.0, alpha) * std::tgamma(alpha / 2.0);
    if (alpha == static_cast<double>(d))
        return RieszConstant{d, alpha, -2.0 / denom, true};
    return RieszConstant{d, alpha, std::tgamma((d - alpha) / 2.0) / denom, false};
}

void validate(const PotentialSpec& spec) {
    std::visit(
        [](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PowerLaw>) {
                if (s.d < 1) throw parameter_error("PowerLaw: dimension must be positive");
                if (!(s.a > s.b && s.b > -static_cast<double>(s.d)))
                    throw parameter_error("PowerLaw: requires a > b > -d");
            } else if constexpr (std::is_same_v<T, RieszQuad>) {
                if (s.d < 1) throw parameter_error("RieszQuad: dimension must be positive");
                if (!(s.alpha > 0.0 && s.alpha < s.d + 2.0))
                    throw parameter_error("RieszQuad: alpha must lie in (0, d+2)");
                if (s.c2 < 0.0) throw parameter_error("RieszQuad: c2 must be >= 0");
            } else if constexpr (std::is_same_v<T, HierGauss>) {
                if (s.d < 1) throw parameter_error("HierGauss: dimension must be positive");
                if (!(s.alpha > 0.0 && s.alpha < s.d + 2.0))
                    throw parameter_error("HierGauss: alpha must lie in (0, d+2)");
                if (s.d == 1 && s.alpha > 1.0 && s.alpha < 2.0)
                    throw parameter_error(
                        "HierGauss: d=1 with alpha in (1,2) rejected, no radial transform identity");
                if (!(s.lambda > 0.0 && s.lambda < 1.0))
                    throw parameter_error("HierGauss: lambda must lie in (0,1)");
                if (s.c_w < 0.0) throw parameter_error("HierGauss: c_w must be >= 0");
                if (s.k_trunc < 0) throw parameter_error("HierGauss: k_trunc must be >= 0");
            } else {
                validate_cantor_params(s.m_ratio, s.alpha, s.level);
                if (s.level < 1) throw parameter_error("CantorPotential: level must be >= 1");
            }
        },
        spec);
}

int dimension(const PotentialSpec& spec) {
    return std::visit(
        [](const auto& s) -> int {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PowerLaw>) return s.d;
            else if constexpr (std::is_same_v<T, RieszQuad>) return s.d;
            else if constexpr (std::is_same_v<T, HierGauss>) return s.d;
            else return 1;
        },
        spec);
}

double eval(const PotentialSpec& spec, double r, int order) {
    if (!(r > 0.0)) throw domain_error("eval: radius must be positive");
    if (order < 0 || order > 2) throw domain_error("eval: order must be 0, 1, or 2");
    validate(spec);
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PowerLaw>) {
                return power_term(s.a, r, order) - power_term(s.b, r, order);
            } else if constexpr (std::is_same_v<T, RieszQuad>) {
                RieszConstant c = riesz_constant(s.d, s.alpha);
                return riesz_term(c, r, order) + quad_term(s.c2, r, order);
            } else if constexpr (std::is_same_v<T, HierGauss>) {
                RieszConstant c = riesz_constant(s.d, s.alpha);
                return riesz_term(c, r, order) + quad_term(s.c2, r, order) +
                       ladder_sum(s, r, order);
            } else {
                PiecewisePoly wp = cantor_kernel_derivative(s.m_ratio, s.alpha, s.level);
                if (order == 1) return wp.eval(r);
                if (order == 2) return wp.eval_derivative(r);
                return wp.antiderivative(0.0, 0.0).eval(r);
            }
        },
        spec);
}

double fourier_hat(const PotentialSpec& spec, double xi) {
    if (!(xi > 0.0)) throw domain_error("fourier_hat: xi must be positive");
    validate(spec);
    return std::visit(
        [&](const auto& s) -> double {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, RieszQuad>) {
                if (s.d == 1 && s.alpha > 1.0 && s.alpha < 2.0)
                    throw domain_error(
                        "fourier_hat: d=1 with alpha in (1,2) has no known transform identity");
                return std::pow(xi, -s.alpha);
            } else if constexpr (std::is_same_v<T, HierGauss>) {
                double sum = 0.0;
                for (int k = 1; k <= s.k_trunc; ++k) {
                    double lk = std::pow(s.lambda, k);
                    double t = lk * lk * xi * xi / 2.0;
                    if (t > 745.0) continue;
                    sum += std::pow(s.lambda, s.alpha * k) * std::exp(-t);
                }
                return std::pow(xi, -s.alpha) -
                       std::pow(2.0 * M_PI, s.d / 2.0) * s.c_w * sum;
            } else {
                throw unsupported_spec_error(
                    "fourier_hat: closed form only for riesz_quad and hier_gauss");
            }
        },
        spec);
}

Thresholds thresholds(int d, double alpha) {
    if (d < 1) throw domain_error("thresholds: dimension must be positive");
    if (d >= 2) {
        if (!(alpha > 0.0 && alpha < d + 2.0))
            throw domain_error("thresholds: alpha must lie in (0, d+2)");
    } else {
        bool ok = (alpha > 0.0 && alpha <= 1.0) || (alpha >= 2.0 && alpha < 3.0);
        if (!ok) throw domain_error("thresholds: for d=1 alpha must lie in (0,1] or [2,3)");
    }
    double c_small = std::pow(alpha, -alpha / 2.0) * std::exp(alpha / 2.0) *
                     std::pow(2.0 * M_PI, -d / 2.0);
    // c_{d,alpha} (d - alpha) extends continuously through alpha = d with value
    // 2 / (pi^{d/2} 2^alpha Gamma(alpha/2))
    double denom = std::pow(M_PI, d / 2.0) * std::pow(2.0, alpha) * std::tgamma(alpha / 2.0);
    double c_times;
    if (alpha == static_cast<double>(d))
        c_times = 2.0 / denom;
    else
        c_times = std::tgamma((d - alpha) / 2.0) / denom * (d - alpha);
    double p = (d + 2.0 - alpha) / 2.0;
    double c_big = std::pow(std::exp(1.0) / (d + 2.0 - alpha), p) * c_times;
    bool ok = (d >= 2) ? (alpha > (d + 2.0) / 2.0 && alpha < d + 2.0)
                       : (alpha >= 2.0 && alpha < 3.0);
    return Thresholds{c_small, c_big, ok};
}

double ladder_truncation_bound(const HierGauss& hg) {
    double q = std::pow(hg.lambda, hg.alpha - hg.d);
    if (q >= 1.0) return std::numeric_limits<double>::infinity();
    return std::pow(q, hg.k_trunc + 1) / (1.0 - q);
}

nlohmann::json spec_to_json(const PotentialSpec& spec) {
    nlohmann::json j;
    std::visit(
        [&](const auto& s) {
            using T = std::decay_t<decltype(s)>;
            if constexpr (std::is_same_v<T, PowerLaw>) {
                j = {{"family", "power_law"}, {"a", s.a}, {"b", s.b}, {"d", s.d}};
            } else if constexpr (std::is_same_v<T, RieszQuad>) {
                j = {{"family", "riesz_quad"}, {"d", s.d}, {"alpha", s.alpha}, {"c2", s.c2}};
            } else if constexpr (std::is_same_v<T, HierGauss>) {
                j = {{"family", "hier_gauss"}, {"d", s.d},     {"alpha", s.alpha},
                     {"lambda", s.lambda},     {"c_w", s.c_w}, {"k_trunc", s.k_trunc},
                     {"c2", s.c2}};
            } else {
                j = {{"family", "cantor"},
                     {"m_ratio", s.m_ratio},
                     {"alpha", s.alpha},
                     {"cantor_level", s.level}};
            }
        },
        spec);
    return j;
}

PotentialSpec spec_from_json(const nlohmann::json& j) {
    if (!j.contains("family")) throw parameter_error("potential spec: missing \"family\"");
    std::string fam = j.at("family").get<std::string>();
    PotentialSpec spec;
    if (fam == "power_law") {
        PowerLaw s;
        s.a = j.at("a").get<double>();
        s.b = j.at("b").get<double>();
        s.d = j.at("d").get<int>();
        spec = s;
    } else if (fam == "riesz_quad") {
        RieszQuad s;
        s.d = j.at("d").get<int>();
        s.alpha = j.at("alpha").get<double>();
        s.c2 = j.value("c2", 0.0);
        spec = s;
    } else if (fam == "hier_gauss") {
        HierGauss s;
        s.d = j.at("d").get<int>();
        s.alpha = j.at("alpha").get<double>();
        s.lambda = j.at("lambda").get<double>();
        s.c_w = j.at("c_w").get<double>();
        s.k_trunc = j.at("k_trunc").get<int>();
        s.c2 = j.value("c2", 0.0);
        spec = s;
    } else if (fam == "cantor") {
        CantorPotential s;
        s.m_ratio = j.at("m_ratio").get<double>();
        s.alpha = j.at("alpha").get<double>();
        s.level = j.at("cantor_level").get<int>();
        spec = s;
    } else {
        throw parameter_error("potential spec: unknown family \"" + fam + "\"");
    }
    validate(spec);
    return spec;
}

std::string family_name(const PotentialSpec& spec) {
    return spec_to_json(spec).at("family").get<std::string>();
}

} // namespace aggmin
