#include "aggmin/measure.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "aggmin/errors.hpp"

namespace aggmin {

double ParticleEnsemble::total_mass() const {
    double s = 0.0;
    for (double x : w) s += x;
    return s;
}

std::vector<double> ParticleEnsemble::center_of_mass() const {
    std::vector<double> c(dim, 0.0);
    double m = 0.0;
    for (std::size_t i = 0; i < size(); ++i) {
        for (int k = 0; k < dim; ++k) c[k] += w[i] * pos[i * dim + k];
        m += w[i];
    }
    if (m != 0.0)
        for (double& x : c) x /= m;
    return c;
}

void ParticleEnsemble::check() const {
    if (dim < 1) throw parameter_error("ParticleEnsemble: dimension must be positive");
    if (pos.size() != w.size() * dim)
        throw parameter_error("ParticleEnsemble: positions/weights size mismatch");
    for (double x : pos)
        if (!std::isfinite(x)) throw parameter_error("ParticleEnsemble: non-finite coordinate");
    for (double x : w)
        if (!std::isfinite(x)) throw parameter_error("ParticleEnsemble: non-finite weight");
}

ParticleEnsemble make_uniform_weights(int dim, std::vector<double> pos) {
    ParticleEnsemble e;
    e.dim = dim;
    e.pos = std::move(pos);
    std::size_t n = e.pos.size() / dim;
    e.w.assign(n, n ? 1.0 / static_cast<double>(n) : 0.0);
    e.check();
    return e;
}

std::size_t GridMeasure::cell_count() const {
    std::size_t n = 1;
    for (int e : extents) n *= static_cast<std::size_t>(e);
    return n;
}

std::vector<double> GridMeasure::midpoint(std::size_t flat) const {
    std::vector<double> x(dim);
    for (int k = dim - 1; k >= 0; --k) {
        std::size_t e = static_cast<std::size_t>(extents[k]);
        x[k] = origin[k] + (static_cast<double>(flat % e) + 0.5) * h;
        flat /= e;
    }
    return x;
}

double GridMeasure::total_mass() const {
    double s = 0.0;
    for (double v : values) s += v;
    return s;
}

double GridMeasure::total_variation() const {
    double s = 0.0;
    for (double v : values) s += std::abs(v);
    return s;
}

void GridMeasure::check() const {
    if (dim < 1) throw parameter_error("GridMeasure: dimension must be positive");
    if (!(h > 0.0)) throw parameter_error("GridMeasure: cell size must be positive");
    if (origin.size() != static_cast<std::size_t>(dim) ||
        extents.size() != static_cast<std::size_t>(dim))
        throw parameter_error("GridMeasure: origin/extents size mismatch");
    for (int e : extents)
        if (e < 1) throw parameter_error("GridMeasure: extents must be positive");
    if (values.size() != cell_count())
        throw parameter_error("GridMeasure: values size mismatch");
}

void validate_cantor_ratio(double m) {
    if (!(m > 3.0)) throw parameter_error("cantor_iterate: ratio M must exceed 3");
}

CantorIterate cantor_iterate(double m_ratio, int level) {
    validate_cantor_ratio(m_ratio);
    if (level < 0) throw parameter_error("cantor_iterate: level must be >= 0");
    if (level > 40) throw parameter_error("cantor_iterate: level capped at 40");
    CantorIterate it;
    it.m_ratio = m_ratio;
    it.level = level;
    it.height = std::pow(m_ratio / 2.0, level);
    double den = std::pow(m_ratio, level);
    // left endpoint numerators: n_{k,l} = sum over set bits of (M-1) M^{k-j};
    // iterative split keeps them exact while they fit a double
    std::vector<double> nums{0.0};
    for (int j = 1; j <= level; ++j) {
        std::vector<double> next;
        next.reserve(nums.size() * 2);
        double step = (m_ratio - 1.0) * std::pow(m_ratio, level - j);
        for (double n : nums) {
            next.push_back(n);
            next.push_back(n + step);
        }
        nums = std::move(next);
    }
    it.intervals.reserve(nums.size());
    for (double n : nums)
        it.intervals.push_back(CantorInterval{n / den, (n + 1.0) / den, n, n + 1.0});
    return it;
}

bool CantorIterate::contains(double x, double tol) const {
    for (const auto& iv : intervals)
        if (x >= iv.a - tol && x <= iv.b + tol) return true;
    return false;
}

std::vector<std::pair<double, double>> CantorIterate::interval_pairs() const {
    std::vector<std::pair<double, double>> out;
    out.reserve(intervals.size());
    for (const auto& iv : intervals) out.emplace_back(iv.a, iv.b);
    return out;
}

int distance_class(double m_ratio, int level, std::uint64_t l1, std::uint64_t l2) {
    validate_cantor_ratio(m_ratio);
    if (level < 0 || level > 62) throw parameter_error("distance_class: bad level");
    std::uint64_t lim = (level >= 63) ? ~0ull : (1ull << level);
    if (l1 >= lim || l2 >= lim) throw parameter_error("distance_class: index out of range");
    if (l1 == l2) return 0;
    // branch labels read MSB-first; the class is one past the common prefix
    for (int j = 1; j <= level; ++j) {
        int shift = level - j;
        if (((l1 >> shift) & 1ull) != ((l2 >> shift) & 1ull)) return j;
    }
    return level; // unreachable for l1 != l2
}

namespace {

template <typename Measure, typename MidpointFn>
std::complex<double> mu_hat_impl(const Measure& mu, std::span<const double> xi, std::size_t n,
                                 MidpointFn&& mid, const std::vector<double>& weights) {
    std::complex<double> s{0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
        double phase = 0.0;
        auto x = mid(i);
        for (std::size_t k = 0; k < xi.size(); ++k) phase += x[k] * xi[k];
        s += weights[i] * std::complex<double>(std::cos(phase), -std::sin(phase));
    }
    return s;
}

} // namespace

std::complex<double> mu_hat(const ParticleEnsemble& mu, std::span<const double> xi) {
    if (xi.size() != static_cast<std::size_t>(mu.dim))
        throw domain_error("mu_hat: frequency dimension mismatch");
    return mu_hat_impl(mu, xi, mu.size(), [&](std::size_t i) { return mu.point(i); }, mu.w);
}

std::complex<double> mu_hat(const GridMeasure& mu, std::span<const double> xi) {
    if (xi.size() != static_cast<std::size_t>(mu.dim))
        throw domain_error("mu_hat: frequency dimension mismatch");
    return mu_hat_impl(mu, xi, mu.cell_count(),
                       [&](std::size_t i) { return mu.midpoint(i); }, mu.values);
}

void write_particles_csv(const ParticleEnsemble& mu, std::ostream& os) {
    static const char* names[] = {"x", "y", "z"};
    if (mu.dim > 3) throw parameter_error("write_particles_csv: dim up to 3");
    for (int k = 0; k < mu.dim; ++k) os << names[k] << ",";
    os << "w\n";
    char buf[32];
    for (std::size_t i = 0; i < mu.size(); ++i) {
        for (int k = 0; k < mu.dim; ++k) {
            std::snprintf(buf, sizeof buf, "%.17g", mu.pos[i * mu.dim + k]);
            os << buf << ",";
        }
        std::snprintf(buf, sizeof buf, "%.17g", mu.w[i]);
        os << buf << "\n";
    }
}

ParticleEnsemble read_particles_csv(std::istream& is) {
    std::string line;
    if (!std::getline(is, line)) throw parameter_error("particles csv: empty file");
    int ncol = 1 + static_cast<int>(std::count(line.begin(), line.end(), ','));
    int dim = ncol - 1;
    if (dim < 1 || dim > 3) throw parameter_error("particles csv: bad header");
    ParticleEnsemble e;
    e.dim = dim;
    while (std::getline(is, line)) {
        if (line.empty()) continue;
        std::stringstream ss(line);
        std::string tok;
        std::vector<double> row;
        while (std::getline(ss, tok, ',')) row.push_back(std::stod(tok));
        if (row.size() != static_cast<std::size_t>(ncol))
            throw parameter_error("particles csv: ragged row");
        for (int k = 0; k < dim; ++k) e.pos.push_back(row[k]);
        e.w.push_back(row[dim]);
    }
    e.check();
    return e;
}

nlohmann::json grid_to_json(const GridMeasure& g) {
    return nlohmann::json{{"origin", g.origin},
                          {"h", g.h},
                          {"extents", g.extents},
                          {"values", g.values}};
}

GridMeasure grid_from_json(const nlohmann::json& j) {
    GridMeasure g;
    g.origin = j.at("origin").get<std::vector<double>>();
    g.h = j.at("h").get<double>();
    g.extents = j.at("extents").get<std::vector<int>>();
    g.values = j.at("values").get<std::vector<double>>();
    g.dim = static_cast<int>(g.origin.size());
    g.check();
    return g;
}

namespace {
constexpr char kGridMagic[8] = {'A', 'G', 'G', 'R', 'I', 'D', '0', '1'};
}

void write_grid_binary(const GridMeasure& g, std::ostream& os) {
    g.check();
    os.write(kGridMagic, 8);
    std::int64_t dim = g.dim;
    os.write(reinterpret_cast<const char*>(&dim), 8);
    os.write(reinterpret_cast<const char*>(&g.h), 8);
    for (double o : g.origin) os.write(reinterpret_cast<const char*>(&o), 8);
    for (int e : g.extents) {
        std::int64_t v = e;
        os.write(reinterpret_cast<const char*>(&v), 8);
    }
    os.write(reinterpret_cast<const char*>(g.values.data()),
             static_cast<std::streamsize>(g.values.size() * 8));
}

GridMeasure read_grid_binary(std::istream& is) {
    char magic[8];
    is.read(magic, 8);
    if (!is || !std::equal(magic, magic + 8, kGridMagic))
        throw parameter_error("grid binary: bad magic");
    std::int64_t dim = 0;
    is.read(reinterpret_cast<char*>(&dim), 8);
    if (dim < 1 || dim > 8) throw parameter_error("grid binary: bad dimension");
    GridMeasure g;
    g.dim = static_cast<int>(dim);
    is.read(reinterpret_cast<char*>(&g.h), 8);
    g.origin.resize(dim);
    for (auto& o : g.origin) is.read(reinterpret_cast<char*>(&o), 8);
    g.extents.resize(dim);
    for (auto& e : g.extents) {
        std::int64_t v = 0;
        is.read(reinterpret_cast<char*>(&v), 8);
        e = static_cast<int>(v);
    }
    if (!is) throw parameter_error("grid binary: truncated header");
    g.values.resize(g.cell_count());
    is.read(reinterpret_cast<char*>(g.values.data()),
            static_cast<std::streamsize>(g.values.size() * 8));
    if (!is) throw parameter_error("grid binary: truncated values");
    g.check();
    return g;
}

} // namespace aggmin
