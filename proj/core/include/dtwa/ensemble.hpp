#pragma once

// Monte Carlo orchestration: deterministic per-trajectory seeding, batched
// parallel trajectory evolution, fixed-order shard reduction, disorder
// averaging, exhaustive enumeration, and convergence sweeps.
//
// Reduction is organized around fixed-size trajectory batches (never around
// workers), so the output is a pure function of the RunConfig no matter how
// many threads execute it.

#include <cstdint>
#include <vector>

#include "dtwa/observables.hpp"
#include "dtwa/run_config.hpp"

namespace dtwa {

struct RealizationSetup {
    std::vector<Eigen::Vector3d> sites;
    ModelParams params;
    ProductState initial;
    std::vector<double> times;
    double dt = 0.0;
    bool closed_form = false;  // pure Ising fast path active
};

// Dilution, couplings and model assembly for one disorder realization.
// Realization r draws its sites from the (master_seed, r) dilution stream.
RealizationSetup build_realization(const RunConfig& config, int realization);

// Monte Carlo estimate with n_t trajectories per disorder realization.
RunResult run_ensemble(const RunConfig& config);

// Single-realization variant used by the sweeps.
RunResult run_ensemble_realization(const RunConfig& config, int realization);

// Exact infinite-sample limit: weighted sum over the whole sampling support.
// Pure Ising models enumerate only the 2^(#transverse sites) frozen-z
// assignments, averaging the unpinned transverse components analytically;
// anything else enumerates the full 4^N product support.
RunResult run_enumerated(const RunConfig& config);

struct ConvergencePoint {
    std::uint64_t n_t = 0;
    double dev_sx = 0.0;  // max over time of |estimate - reference|, / max_t |reference|
    double dev_xi = 0.0;
};

struct ConvergenceResult {
    std::vector<ConvergencePoint> points;  // every n_t below the reference
    std::uint64_t reference_n_t = 0;
    double slope_sx = 0.0;  // log-log slope of deviation vs n_t
    double slope_xi = 0.0;
};

// Repeats the run at each trajectory count (independent sub-seeds), measures
// deviations from the largest run, and fits the log-log slopes.
ConvergenceResult convergence_sweep(const RunConfig& config,
                                    std::vector<std::uint64_t> n_t_list);

struct FillingPoint {
    double filling = 0.0;
    double min_xi_mean = 0.0;    // min over time of xi, averaged over realizations
    double min_xi_spread = 0.0;  // standard error of that mean over realizations
    int realizations = 0;
};

// Filling-fraction scan: per filling, disorder_realizations independent
// dilutions, each contributing its own min_t xi.
std::vector<FillingPoint> sweep_filling(const RunConfig& config,
                                        const std::vector<double>& fillings);

}  // namespace dtwa
