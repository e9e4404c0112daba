#pragma once

// CSV / JSON serialization of results. Number formatting is fixed at
// round-trip precision so identical results serialize to identical bytes.

#include <iosfwd>
#include <string>
#include <vector>

#include "dtwa/ensemble.hpp"
#include "dtwa/observables.hpp"
#include "dtwa/run_config.hpp"

namespace dtwa {

// shortest round-trip decimal form ("%.17g", nan -> "nan")
std::string format_double(double v);

// Long-format series table: time,observable,estimate,std_error,n_t
void write_csv(std::ostream& out, const RunResult& result);
std::string to_csv(const RunResult& result);

// Run metadata (seed, config digest, version) plus every series.
void write_json(std::ostream& out, const RunResult& result, const RunConfig& config);

// time,dtwa,oracle,abs_diff,std_error rows for one observable
struct OracleComparison {
    std::string observable;
    std::vector<double> times;
    std::vector<double> dtwa;
    std::vector<double> oracle;
    std::vector<double> std_error;
};
void write_oracle_compare_csv(std::ostream& out, const OracleComparison& comparison);

void write_convergence_csv(std::ostream& out, const ConvergenceResult& result);
void write_filling_csv(std::ostream& out, const std::vector<FillingPoint>& points);

// opt-in debug dump: one row per (time, trajectory) with the collective tuple
void write_trajectory_dump(std::ostream& out, const RunResult& result);

// Per-figure style data files (per-spin magnetization, squeezing, correlation
// profile) derived from one result; returns the paths written.
std::vector<std::string> emit_plot_data(const std::string& directory, const RunResult& result,
                                        const RunConfig& config);

}  // namespace dtwa
