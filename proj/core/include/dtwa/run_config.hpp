#pragma once

// Full experiment description: model, lattice, initial state, sampler, time
// grid, trajectory budget, seeding, and observable requests. Parsed from a
// JSON file; identical configs (including master_seed) produce bit-identical
// output regardless of worker count.

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "dtwa/dynamics.hpp"
#include "dtwa/lattice.hpp"
#include "dtwa/observables.hpp"
#include "dtwa/phase_space.hpp"

namespace dtwa {

enum class ModelKind { ising, xy, xxz };
ModelKind parse_model_kind(const std::string& name);
std::string to_string(ModelKind kind);

enum class SamplerKind { dtwa, gaussian };
SamplerKind parse_sampler_kind(const std::string& name);
std::string to_string(SamplerKind kind);

struct TimeSpec {
    double t_max = 1.0;
    int n_out = 26;
    std::optional<double> dt;                  // empty: integrator default
    std::optional<std::vector<double>> times;  // explicit grid overrides t_max/n_out
    bool force_integrator = false;

    std::vector<double> grid() const;
};

struct PairSpec {
    bool center_to_all = false;
    int center = -1;  // -1: N/2
    std::vector<PairRequest> explicit_pairs;
};

struct RunConfig {
    // lattice + couplings
    LatticeSpec lattice;
    double j = 1.0;
    double alpha = 0.0;
    CouplingMode mode = CouplingMode::isotropic;

    // model
    ModelKind kind = ModelKind::ising;
    double omega = 0.0;
    double j_perp_factor = 1.0;  // xxz only: J_perp = factor * base couplings
    double j_z_factor = 1.0;

    // initial state
    std::vector<Polarization> initial_axes;  // size 1: uniform; else per site

    SamplerKind sampler = SamplerKind::dtwa;
    TimeSpec time;

    // ensemble
    std::uint64_t n_t = 1000;
    std::uint64_t master_seed = 1;
    int disorder_realizations = 1;
    int workers = 0;  // 0: hardware concurrency
    int batch_size = 256;
    std::uint64_t enumeration_cap = std::uint64_t{1} << 24;
    double memory_cap_mib = 4096.0;

    // observables
    bool squeezing = true;
    bool squeezing_errors = true;
    bool site_means = true;
    bool dump_trajectories = false;  // retain per-trajectory collective tuples
    PairSpec pairs;

    int n_sites() const { return lattice.n_sites(); }
    ProductState initial_state() const;
    std::vector<PairRequest> pair_list() const;  // resolved against n_sites()
    int profile_center() const;

    void validate() const;
};

RunConfig config_from_json(const std::string& json_text);
RunConfig load_config(const std::string& path);
std::string config_to_json(const RunConfig& config);

// FNV-1a over the canonical JSON form; stamped into result metadata.
std::string config_digest(const RunConfig& config);

}  // namespace dtwa
