#pragma once

// Trajectory- and ensemble-level estimation: collective spin moments, pair
// correlators, spin squeezing, statistical errors, and the mergeable
// accumulator that parallel workers reduce into.

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "dtwa/errors.hpp"
#include "dtwa/phase_space.hpp"

namespace dtwa {

// Compensated (Kahan) summation; merge order is fixed by the caller so sums
// are bitwise reproducible.
class KahanSum {
public:
    void add(double v) {
        const double y = v - c_;
        const double t = s_ + y;
        c_ = (t - s_) - y;
        s_ = t;
    }
    void merge(const KahanSum& other) {
        add(other.s_);
        add(-other.c_);
    }
    double value() const { return s_ - c_; }

private:
    double s_ = 0.0;
    double c_ = 0.0;
};

struct PairRequest {
    int i = 0;
    int j = 0;  // i == j requests the on-site second moments
    bool operator==(const PairRequest&) const = default;
};

struct ObservablesRequest {
    bool squeezing = false;
    bool squeezing_errors = true;  // keep per-trajectory samples for the xi jackknife
    bool site_means = false;
    // retain per-trajectory collective tuples (jackknife input / debug dump)
    bool collective_samples = false;
    std::vector<PairRequest> pairs;
};

// Per-site moments of one trajectory family with the unpinned transverse
// components averaged out analytically: m = first moments, q = on-site second
// moments. Used by the exact Ising-restricted enumeration.
struct FactorizedMoments {
    Eigen::VectorXd mx, my, mz;
    Eigen::VectorXd qxx, qyy, qzz, qxy, qxz, qyz;

    explicit FactorizedMoments(int n)
        : mx(n), my(n), mz(n), qxx(n), qyy(n), qzz(n), qxy(n), qxz(n), qyz(n) {}
};

// Mergeable running moments over trajectories, per output time. Collective
// first moments S_a = sum_n s^a_n are formed per trajectory before squaring.
class EnsembleAccumulator {
public:
    EnsembleAccumulator(int n_sites, int n_times, ObservablesRequest request);

    void add_configuration(int time_index, const SpinConfiguration& s, double weight = 1.0);
    void add_batch(int time_index, const SpinBatch& batch, double uniform_weight = 1.0);
    void add_factorized(int time_index, const FactorizedMoments& f, double weight);

    // Merge `other` into this accumulator. Callers merge shards in a fixed
    // order (by shard index) so reductions are scheduling independent.
    void merge(const EnsembleAccumulator& other);

    int n_sites() const { return n_sites_; }
    int n_times() const { return n_times_; }
    // trajectories seen by a time slot (identical across slots in normal use)
    std::uint64_t count(int time_index = 0) const;
    double total_weight(int time_index = 0) const;
    bool weighted() const { return weighted_; }
    const ObservablesRequest& request() const { return request_; }

    // slot accessors used by summarize(); collective slot order:
    // Sx, Sy, Sz, SxSx, SxSy, SxSz, SySy, SySz, SzSz
    static constexpr int kCollectiveSlots = 9;
    double slot_sum(int time_index, int slot) const;
    double slot_sum_sq(int time_index, int slot) const;
    int n_slots() const { return n_slots_; }
    int site_slot(Axis a, int site) const;
    int pair_slot(int pair_index, Axis a, Axis b) const;

    const std::vector<std::array<double, 9>>& xi_samples(int time_index) const;
    bool has_xi_samples() const { return !xi_samples_.empty(); }

private:
    void add_values(int time_index, const double* values, double weight);

    int n_sites_ = 0;
    int n_times_ = 0;
    int n_slots_ = 0;
    ObservablesRequest request_;
    std::vector<std::uint64_t> count_;  // per time index
    std::vector<KahanSum> weight_;      // per time index
    bool weighted_ = false;
    std::vector<KahanSum> sums_;     // n_times * n_slots
    std::vector<KahanSum> sums_sq_;  // n_times * n_slots
    std::vector<std::vector<std::array<double, 9>>> xi_samples_;  // per time, per trajectory
    std::vector<double> scratch_;
};

struct Squeezing {
    double xi = 0.0;
    Eigen::Vector3d direction = Eigen::Vector3d::Zero();  // minimizing unit vector
};

// xi = sqrt(N) * min_{n perp <S>} DeltaS_perp / |<S>| from the mean collective
// spin and the symmetric second-moment matrix <S_a S_b>. Throws
// SqueezingUndefinedError when |<S>| < 1e-9 N.
Squeezing squeezing_xi(const Eigen::Vector3d& s_mean, const Eigen::Matrix3d& second_moments,
                       int n_sites);

struct ObservableSeries {
    std::string name;
    std::vector<double> estimate;
    std::vector<double> std_error;  // NaN when undefined
};

struct RunResult {
    std::vector<double> times;
    std::vector<ObservableSeries> series;
    std::uint64_t n_t = 0;  // trajectories (or support size for exact runs)
    bool exact = false;     // enumeration limit: zero statistical error
    bool errors_defined = true;
    std::uint64_t master_seed = 0;
    std::string config_digest;
    int disorder_realizations = 1;
    std::vector<std::string> warnings;
    std::vector<Eigen::Vector3d> xi_direction;  // per time when squeezing was computed
    // [time][trajectory] collective tuples (Sx..SzSz), present only when the
    // per-trajectory dump was requested
    std::vector<std::vector<std::array<double, 9>>> trajectory_samples;

    const ObservableSeries* find(const std::string& name) const;
    const ObservableSeries& at(const std::string& name) const;  // throws ConfigError
};

// Fixed-order estimate extraction: collective rows (raw and per-spin), the
// derived variance row, squeezing with jackknife errors, site means, pairs.
RunResult summarize(const EnsembleAccumulator& acc, const std::vector<double>& times);

// Mean over disorder realizations; std_error = realization spread / sqrt(R).
RunResult combine_realizations(const std::vector<RunResult>& realizations);

// Observable naming helpers shared by summarize(), the CSV layer and tests.
std::string site_series_name(Axis a, int site);
std::string pair_series_name(Axis a, Axis b, int i, int j);

// Connected spatial correlation profile C^ab_j = <s^a_c s^b_{c+j}> -
// <s^a_c><s^b_{c+j}> from a result holding center-to-all pairs and site
// means. Throws ConfigError listing the configured pairs when missing.
struct CorrelationProfile {
    int center = 0;
    std::vector<int> offsets;
    std::vector<std::vector<double>> values;  // [time][offset]
};
CorrelationProfile correlation_profile(const RunResult& result, int center, Axis a, Axis b);

}  // namespace dtwa
