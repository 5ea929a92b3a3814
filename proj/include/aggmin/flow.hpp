#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "aggmin/measure.hpp"
#include "aggmin/potential.hpp"

namespace aggmin {

struct InitSpec {
    enum class Kind { UniformBox, ExplicitList, Ring } kind = Kind::UniformBox;
    std::vector<double> lo;     // UniformBox
    std::vector<double> hi;
    std::vector<double> points; // ExplicitList, flat
    double radius = 1.0;        // Ring
    std::vector<double> center;
};

struct SimConfig {
    PotentialSpec spec;
    int dim = 2;
    std::size_t n_particles = 100;
    double dt = 0.01;
    double t_final = 1.0;
    InitSpec init;
    std::uint64_t seed = 0;
    std::size_t snapshot_stride = 1; // steps between recorded snapshots
    double r_min = 1e-8;             // force regularization radius
    double blowup_bound = 1e6;

    void check() const;
};

SimConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const SimConfig& c);

struct Trajectory {
    std::vector<double> times;               // per snapshot
    std::vector<ParticleEnsemble> snapshots; // per snapshot
    std::vector<double> energies;            // per snapshot
    std::vector<double> max_step_displacement; // per time step

    const ParticleEnsemble& final_state() const { return snapshots.back(); }
};

// classical RK4 on dx_i/dt = -(1/N) sum_{j != i} W'(r_ij) (x_i - x_j)/r_ij;
// pairs closer than r_min contribute the force magnitude frozen at r_min
Trajectory simulate(const SimConfig& config);

struct EnergyMonitor {
    double max_uptick; // max (E_{n+1} - E_n) / max(1, |E_n|)
};
EnergyMonitor energy_monitor(const Trajectory& traj);

} // namespace aggmin
