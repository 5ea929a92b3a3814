#pragma once

#include <complex>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

namespace aggmin {

// N weighted points in R^d, flat row-major storage.
struct ParticleEnsemble {
    int dim = 2;
    std::vector<double> pos; // size N*dim
    std::vector<double> w;   // size N

    std::size_t size() const { return w.size(); }
    std::span<const double> point(std::size_t i) const {
        return {pos.data() + i * dim, static_cast<std::size_t>(dim)};
    }
    double total_mass() const;
    std::vector<double> center_of_mass() const;
    void check() const; // finite coordinates, matching sizes
};

ParticleEnsemble make_uniform_weights(int dim, std::vector<double> pos);

// Signed measure sampled on a regular grid; values are per-cell masses and the
// measure acts through the cell midpoints (midpoint rule everywhere).
struct GridMeasure {
    int dim = 1;
    std::vector<double> origin; // size dim
    double h = 1.0;
    std::vector<int> extents;   // size dim
    std::vector<double> values; // prod(extents) cell masses, row-major

    std::size_t cell_count() const;
    std::vector<double> midpoint(std::size_t flat_index) const;
    double total_mass() const;
    double total_variation() const;
    void check() const;
};

// level-k iterate of the two-branch ratio-1/M Cantor construction on [0,1]
struct CantorInterval {
    double a;
    double b;
    // endpoints are exactly (numerator / M^k); numerators kept for exact arithmetic
    double num_a;
    double num_b;
};

struct CantorIterate {
    double m_ratio;
    int level;
    double height; // (M/2)^k
    std::vector<CantorInterval> intervals;

    bool contains(double x, double tol = 0.0) const;
    std::vector<std::pair<double, double>> interval_pairs() const;
};

// 2^k closed intervals of length M^{-k}, density (M/2)^k on each.
// Levels above 40 are rejected (M^{-k} would approach underflow).
CantorIterate cantor_iterate(double m_ratio, int level);

// Distance class of lemma form: "same" (encoded 0) iff l1 == l2, otherwise the
// unique j in 1..k with |I_{k,l1} - I_{k,l2}| inside [(M-2)_(j), M_(j)].
int distance_class(double m_ratio, int level, std::uint64_t l1, std::uint64_t l2);

// mu_hat(xi) = sum w_j exp(-i x_j . xi); grids use cell midpoints
std::complex<double> mu_hat(const ParticleEnsemble& mu, std::span<const double> xi);
std::complex<double> mu_hat(const GridMeasure& mu, std::span<const double> xi);

// CSV with header "x,y[,z],w"
void write_particles_csv(const ParticleEnsemble& mu, std::ostream& os);
ParticleEnsemble read_particles_csv(std::istream& is);

nlohmann::json grid_to_json(const GridMeasure& g);
GridMeasure grid_from_json(const nlohmann::json& j);
void write_grid_binary(const GridMeasure& g, std::ostream& os);
GridMeasure read_grid_binary(std::istream& is);

} // namespace aggmin
