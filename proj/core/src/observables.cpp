#include "dtwa/observables.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>

namespace dtwa {

namespace {

constexpr double kNan = std::numeric_limits<double>::quiet_NaN();

const char* axis_name(Axis a) {
    static const char* names[3] = {"x", "y", "z"};
    return names[static_cast<int>(a)];
}

// order of the 9 collective slots
enum CollectiveSlot { kSx, kSy, kSz, kSxSx, kSxSy, kSxSz, kSySy, kSySz, kSzSz };

}  // namespace

std::string site_series_name(Axis a, int site) {
    std::ostringstream s;
    s << "site_s" << axis_name(a) << "_" << site;
    return s.str();
}

std::string pair_series_name(Axis a, Axis b, int i, int j) {
    std::ostringstream s;
    s << "pair_" << axis_name(a) << axis_name(b) << "_" << i << "_" << j;
    return s.str();
}

EnsembleAccumulator::EnsembleAccumulator(int n_sites, int n_times, ObservablesRequest request)
    : n_sites_(n_sites), n_times_(n_times), request_(std::move(request)) {
    if (n_sites < 1 || n_times < 1)
        throw ConfigError("accumulator needs at least one site and one output time");
    for (const auto& p : request_.pairs) {
        if (p.i < 0 || p.i >= n_sites || p.j < 0 || p.j >= n_sites)
            throw ConfigError("pair request outside the site range");
    }
    n_slots_ = kCollectiveSlots + (request_.site_means ? 3 * n_sites : 0) +
               9 * static_cast<int>(request_.pairs.size());
    count_.assign(static_cast<std::size_t>(n_times), 0);
    weight_.assign(static_cast<std::size_t>(n_times), KahanSum{});
    sums_.assign(static_cast<std::size_t>(n_times) * n_slots_, KahanSum{});
    sums_sq_.assign(static_cast<std::size_t>(n_times) * n_slots_, KahanSum{});
    if (request_.collective_samples || (request_.squeezing && request_.squeezing_errors))
        xi_samples_.resize(static_cast<std::size_t>(n_times));
    scratch_.resize(static_cast<std::size_t>(n_slots_));
}

int EnsembleAccumulator::site_slot(Axis a, int site) const {
    if (!request_.site_means) throw ConfigError("site means were not requested");
    return kCollectiveSlots + static_cast<int>(a) * n_sites_ + site;
}

int EnsembleAccumulator::pair_slot(int pair_index, Axis a, Axis b) const {
    const int base = kCollectiveSlots + (request_.site_means ? 3 * n_sites_ : 0);
    return base + 9 * pair_index + 3 * static_cast<int>(a) + static_cast<int>(b);
}

std::uint64_t EnsembleAccumulator::count(int time_index) const {
    return count_[static_cast<std::size_t>(time_index)];
}

double EnsembleAccumulator::total_weight(int time_index) const {
    return weight_[static_cast<std::size_t>(time_index)].value();
}

double EnsembleAccumulator::slot_sum(int time_index, int slot) const {
    return sums_[static_cast<std::size_t>(time_index) * n_slots_ + slot].value();
}

double EnsembleAccumulator::slot_sum_sq(int time_index, int slot) const {
    return sums_sq_[static_cast<std::size_t>(time_index) * n_slots_ + slot].value();
}

const std::vector<std::array<double, 9>>& EnsembleAccumulator::xi_samples(
    int time_index) const {
    static const std::vector<std::array<double, 9>> empty;
    if (xi_samples_.empty()) return empty;
    return xi_samples_[static_cast<std::size_t>(time_index)];
}

void EnsembleAccumulator::add_values(int time_index, const double* values, double weight) {
    KahanSum* sums = &sums_[static_cast<std::size_t>(time_index) * n_slots_];
    KahanSum* sq = &sums_sq_[static_cast<std::size_t>(time_index) * n_slots_];
    if (weight == 1.0) {
        for (int k = 0; k < n_slots_; ++k) {
            sums[k].add(values[k]);
            sq[k].add(values[k] * values[k]);
        }
    } else {
        for (int k = 0; k < n_slots_; ++k) {
            sums[k].add(weight * values[k]);
            sq[k].add(weight * values[k] * values[k]);
        }
        weighted_ = true;
    }
    count_[static_cast<std::size_t>(time_index)] += 1;
    weight_[static_cast<std::size_t>(time_index)].add(weight);
}

void EnsembleAccumulator::add_configuration(int time_index, const SpinConfiguration& s,
                                            double weight) {
    if (s.n_sites() != n_sites_) throw ConfigError("configuration size mismatch");
    double* v = scratch_.data();
    const double sx = s.x.sum();
    const double sy = s.y.sum();
    const double sz = s.z.sum();
    v[kSx] = sx;
    v[kSy] = sy;
    v[kSz] = sz;
    v[kSxSx] = sx * sx;
    v[kSxSy] = sx * sy;
    v[kSxSz] = sx * sz;
    v[kSySy] = sy * sy;
    v[kSySz] = sy * sz;
    v[kSzSz] = sz * sz;
    if (request_.site_means) {
        const int base = kCollectiveSlots;
        for (int i = 0; i < n_sites_; ++i) v[base + i] = s.x[i];
        for (int i = 0; i < n_sites_; ++i) v[base + n_sites_ + i] = s.y[i];
        for (int i = 0; i < n_sites_; ++i) v[base + 2 * n_sites_ + i] = s.z[i];
    }
    if (!request_.pairs.empty()) {
        int slot = kCollectiveSlots + (request_.site_means ? 3 * n_sites_ : 0);
        for (const auto& p : request_.pairs) {
            const double a[3] = {s.x[p.i], s.y[p.i], s.z[p.i]};
            const double b[3] = {s.x[p.j], s.y[p.j], s.z[p.j]};
            for (int ca = 0; ca < 3; ++ca)
                for (int cb = 0; cb < 3; ++cb) v[slot++] = a[ca] * b[cb];
        }
    }
    add_values(time_index, v, weight);
    if (!xi_samples_.empty() && weight == 1.0) {
        xi_samples_[static_cast<std::size_t>(time_index)].push_back(
            {v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]});
    }
}

void EnsembleAccumulator::add_batch(int time_index, const SpinBatch& batch,
                                    double uniform_weight) {
    for (int c = 0; c < batch.n_traj(); ++c)
        add_configuration(time_index, batch.column(c), uniform_weight);
}

void EnsembleAccumulator::add_factorized(int time_index, const FactorizedMoments& f,
                                         double weight) {
    double* v = scratch_.data();
    const double mx = f.mx.sum();
    const double my = f.my.sum();
    const double mz = f.mz.sum();
    // <S_a S_b> under the analytic transverse average: the cross terms
    // factorize while same-site products come from q
    v[kSx] = mx;
    v[kSy] = my;
    v[kSz] = mz;
    v[kSxSx] = mx * mx - f.mx.dot(f.mx) + f.qxx.sum();
    v[kSxSy] = mx * my - f.mx.dot(f.my) + f.qxy.sum();
    v[kSxSz] = mx * mz - f.mx.dot(f.mz) + f.qxz.sum();
    v[kSySy] = my * my - f.my.dot(f.my) + f.qyy.sum();
    v[kSySz] = my * mz - f.my.dot(f.mz) + f.qyz.sum();
    v[kSzSz] = mz * mz - f.mz.dot(f.mz) + f.qzz.sum();
    if (request_.site_means) {
        const int base = kCollectiveSlots;
        for (int i = 0; i < n_sites_; ++i) v[base + i] = f.mx[i];
        for (int i = 0; i < n_sites_; ++i) v[base + n_sites_ + i] = f.my[i];
        for (int i = 0; i < n_sites_; ++i) v[base + 2 * n_sites_ + i] = f.mz[i];
    }
    if (!request_.pairs.empty()) {
        int slot = kCollectiveSlots + (request_.site_means ? 3 * n_sites_ : 0);
        for (const auto& p : request_.pairs) {
            if (p.i == p.j) {
                const int i = p.i;
                const double q[3][3] = {{f.qxx[i], f.qxy[i], f.qxz[i]},
                                        {f.qxy[i], f.qyy[i], f.qyz[i]},
                                        {f.qxz[i], f.qyz[i], f.qzz[i]}};
                for (int ca = 0; ca < 3; ++ca)
                    for (int cb = 0; cb < 3; ++cb) v[slot++] = q[ca][cb];
            } else {
                const double a[3] = {f.mx[p.i], f.my[p.i], f.mz[p.i]};
                const double b[3] = {f.mx[p.j], f.my[p.j], f.mz[p.j]};
                for (int ca = 0; ca < 3; ++ca)
                    for (int cb = 0; cb < 3; ++cb) v[slot++] = a[ca] * b[cb];
            }
        }
    }
    add_values(time_index, v, weight);
    weighted_ = true;
}

void EnsembleAccumulator::merge(const EnsembleAccumulator& other) {
    if (other.n_sites_ != n_sites_ || other.n_times_ != n_times_ ||
        other.n_slots_ != n_slots_)
        throw ConfigError("cannot merge accumulators with different shapes");
    for (std::size_t k = 0; k < sums_.size(); ++k) {
        sums_[k].merge(other.sums_[k]);
        sums_sq_[k].merge(other.sums_sq_[k]);
    }
    if (!xi_samples_.empty() && !other.xi_samples_.empty()) {
        for (std::size_t t = 0; t < xi_samples_.size(); ++t) {
            auto& dst = xi_samples_[t];
            const auto& src = other.xi_samples_[t];
            dst.insert(dst.end(), src.begin(), src.end());
        }
    }
    for (std::size_t t = 0; t < count_.size(); ++t) {
        count_[t] += other.count_[t];
        weight_[t].merge(other.weight_[t]);
    }
    weighted_ = weighted_ || other.weighted_;
}

Squeezing squeezing_xi(const Eigen::Vector3d& s_mean, const Eigen::Matrix3d& second_moments,
                       int n_sites) {
    const double norm = s_mean.norm();
    if (norm < 1e-9 * static_cast<double>(n_sites))
        throw SqueezingUndefinedError(
            "mean collective spin is too small to define a squeezing direction");
    const Eigen::Vector3d m = s_mean / norm;

    // orthonormal transverse frame; seed with the basis vector least aligned
    // with the mean spin
    int least = 0;
    m.cwiseAbs().minCoeff(&least);
    Eigen::Vector3d seed = Eigen::Vector3d::Zero();
    seed[least] = 1.0;
    const Eigen::Vector3d e1 = (seed - seed.dot(m) * m).normalized();
    const Eigen::Vector3d e2 = m.cross(e1);

    const Eigen::Matrix3d cov = second_moments - s_mean * s_mean.transpose();
    const double c11 = e1.dot(cov * e1);
    const double c22 = e2.dot(cov * e2);
    const double c12 = e1.dot(cov * e2);

    // smallest eigenvalue of the 2x2 transverse covariance
    const double half_trace = 0.5 * (c11 + c22);
    const double disc = std::sqrt(std::max(0.25 * (c11 - c22) * (c11 - c22) + c12 * c12, 0.0));
    const double lambda_min = half_trace - disc;

    // eigenvector for lambda_min (either one on degeneracy)
    double ux = c12;
    double uy = lambda_min - c11;
    const double len = std::hypot(ux, uy);
    if (len < 1e-14) {
        ux = 1.0;
        uy = 0.0;
    } else {
        ux /= len;
        uy /= len;
    }

    Squeezing out;
    out.xi = std::sqrt(std::max(lambda_min, 0.0) * static_cast<double>(n_sites)) / norm;
    out.direction = ux * e1 + uy * e2;
    return out;
}

const ObservableSeries* RunResult::find(const std::string& name) const {
    for (const auto& s : series)
        if (s.name == name) return &s;
    return nullptr;
}

const ObservableSeries& RunResult::at(const std::string& name) const {
    const ObservableSeries* s = find(name);
    if (!s) throw ConfigError("result does not contain observable '" + name + "'");
    return *s;
}

namespace {

struct SlotStats {
    double mean = kNan;
    double se = kNan;
};

SlotStats slot_stats(const EnsembleAccumulator& acc, int t, int slot) {
    SlotStats st;
    const double w = acc.total_weight(t);
    if (w <= 0.0) return st;
    st.mean = acc.slot_sum(t, slot) / w;
    if (acc.weighted()) {
        st.se = 0.0;  // exact weighted sums carry no sampling error
        return st;
    }
    const auto n = static_cast<double>(acc.count(t));
    if (n < 2.0) {
        st.se = kNan;
        return st;
    }
    const double var = (acc.slot_sum_sq(t, slot) - n * st.mean * st.mean) / (n - 1.0);
    st.se = std::sqrt(std::max(var, 0.0) / n);
    return st;
}

Eigen::Vector3d mean_spin(const EnsembleAccumulator& acc, int t) {
    const double w = acc.total_weight(t);
    return {acc.slot_sum(t, 0) / w, acc.slot_sum(t, 1) / w, acc.slot_sum(t, 2) / w};
}

Eigen::Matrix3d second_moments(const EnsembleAccumulator& acc, int t) {
    const double w = acc.total_weight(t);
    Eigen::Matrix3d ss;
    const double xx = acc.slot_sum(t, 3) / w;
    const double xy = acc.slot_sum(t, 4) / w;
    const double xz = acc.slot_sum(t, 5) / w;
    const double yy = acc.slot_sum(t, 6) / w;
    const double yz = acc.slot_sum(t, 7) / w;
    const double zz = acc.slot_sum(t, 8) / w;
    ss << xx, xy, xz, xy, yy, yz, xz, yz, zz;
    return ss;
}

double xi_from_tuple(const std::array<double, 9>& m, int n_sites) {
    const Eigen::Vector3d s(m[0], m[1], m[2]);
    Eigen::Matrix3d ss;
    ss << m[3], m[4], m[5], m[4], m[6], m[7], m[5], m[7], m[8];
    return squeezing_xi(s, ss, n_sites).xi;
}

// delete-1 jackknife over trajectories
double jackknife_xi_error(const std::vector<std::array<double, 9>>& samples, int n_sites) {
    const std::size_t n = samples.size();
    if (n < 2) return kNan;
    std::array<double, 9> totals{};
    for (const auto& s : samples)
        for (int k = 0; k < 9; ++k) totals[k] += s[k];

    KahanSum sum, sum_sq;
    const double denom = static_cast<double>(n) - 1.0;
    for (const auto& s : samples) {
        std::array<double, 9> loo{};
        for (int k = 0; k < 9; ++k) loo[k] = (totals[k] - s[k]) / denom;
        double xi_k;
        try {
            xi_k = xi_from_tuple(loo, n_sites);
        } catch (const SqueezingUndefinedError&) {
            return kNan;
        }
        sum.add(xi_k);
        sum_sq.add(xi_k * xi_k);
    }
    const double nd = static_cast<double>(n);
    const double mean = sum.value() / nd;
    const double var = std::max(sum_sq.value() / nd - mean * mean, 0.0);
    // sqrt((n-1)/n * sum_k (xi_k - mean)^2) = sqrt((n-1) * var)
    return std::sqrt(denom * var);
}

}  // namespace

RunResult summarize(const EnsembleAccumulator& acc, const std::vector<double>& times) {
    if (static_cast<int>(times.size()) != acc.n_times())
        throw ConfigError("time grid does not match accumulator");
    if (acc.count() == 0) throw ConfigError("cannot summarize an empty accumulator");

    const int n_times = acc.n_times();
    const int n_sites = acc.n_sites();
    RunResult out;
    out.times = times;
    out.n_t = acc.count();
    out.exact = acc.weighted();
    out.errors_defined = acc.weighted() || acc.count() >= 2;

    // reserve the full layout up front: references into `series` stay valid
    const std::size_t series_count = 9 + 3 + 1 + (acc.request().squeezing ? 1 : 0) +
                                     (acc.request().site_means ? 3u * n_sites : 0) +
                                     9 * acc.request().pairs.size();
    out.series.reserve(series_count);
    auto make_series = [&](const std::string& name) -> ObservableSeries& {
        out.series.push_back({name, std::vector<double>(n_times, kNan),
                              std::vector<double>(n_times, kNan)});
        return out.series.back();
    };

    static const char* collective_names[9] = {"Sx",   "Sy",   "Sz",   "SxSx", "SxSy",
                                              "SxSz", "SySy", "SySz", "SzSz"};
    std::array<ObservableSeries*, 9> collective{};
    for (int k = 0; k < 9; ++k) collective[k] = &make_series(collective_names[k]);
    ObservableSeries* per_spin[3] = {&make_series("Sx_per_spin"), &make_series("Sy_per_spin"),
                                     &make_series("Sz_per_spin")};
    ObservableSeries& var_sx = make_series("var_Sx");
    ObservableSeries* xi_series = nullptr;
    if (acc.request().squeezing) xi_series = &make_series("xi");

    // collective rows
    for (int t = 0; t < n_times; ++t) {
        for (int k = 0; k < 9; ++k) {
            const SlotStats st = slot_stats(acc, t, k);
            collective[k]->estimate[t] = st.mean;
            collective[k]->std_error[t] = st.se;
        }
        for (int a = 0; a < 3; ++a) {
            per_spin[a]->estimate[t] = collective[a]->estimate[t] / n_sites;
            per_spin[a]->std_error[t] = collective[a]->std_error[t] / n_sites;
        }
        // var(Sx) with a delta-method error from the two contributing rows
        const double sx = collective[0]->estimate[t];
        const double se_sx = collective[0]->std_error[t];
        const double se_sxsx = collective[3]->std_error[t];
        var_sx.estimate[t] = collective[3]->estimate[t] - sx * sx;
        var_sx.std_error[t] =
            std::isnan(se_sx) ? kNan : std::hypot(se_sxsx, 2.0 * sx * se_sx);
    }

    // squeezing
    if (xi_series) {
        out.xi_direction.assign(static_cast<std::size_t>(n_times), Eigen::Vector3d::Zero());
        for (int t = 0; t < n_times; ++t) {
            try {
                const Squeezing sq = squeezing_xi(mean_spin(acc, t), second_moments(acc, t),
                                                  n_sites);
                xi_series->estimate[t] = sq.xi;
                out.xi_direction[static_cast<std::size_t>(t)] = sq.direction;
            } catch (const SqueezingUndefinedError&) {
                xi_series->estimate[t] = kNan;
                out.warnings.push_back("squeezing undefined at t = " +
                                       std::to_string(times[static_cast<std::size_t>(t)]));
            }
            if (acc.weighted()) {
                xi_series->std_error[t] = 0.0;
            } else if (acc.has_xi_samples()) {
                xi_series->std_error[t] = jackknife_xi_error(acc.xi_samples(t), n_sites);
            }
        }
    }

    // site means
    if (acc.request().site_means) {
        for (int a = 0; a < 3; ++a) {
            for (int i = 0; i < n_sites; ++i) {
                ObservableSeries& s = make_series(site_series_name(static_cast<Axis>(a), i));
                const int slot = acc.site_slot(static_cast<Axis>(a), i);
                for (int t = 0; t < n_times; ++t) {
                    const SlotStats st = slot_stats(acc, t, slot);
                    s.estimate[t] = st.mean;
                    s.std_error[t] = st.se;
                }
            }
        }
    }

    // pair correlators
    for (std::size_t p = 0; p < acc.request().pairs.size(); ++p) {
        const auto& pr = acc.request().pairs[p];
        for (int a = 0; a < 3; ++a) {
            for (int b = 0; b < 3; ++b) {
                ObservableSeries& s = make_series(pair_series_name(
                    static_cast<Axis>(a), static_cast<Axis>(b), pr.i, pr.j));
                const int slot =
                    acc.pair_slot(static_cast<int>(p), static_cast<Axis>(a), static_cast<Axis>(b));
                for (int t = 0; t < n_times; ++t) {
                    const SlotStats st = slot_stats(acc, t, slot);
                    s.estimate[t] = st.mean;
                    s.std_error[t] = st.se;
                }
            }
        }
    }

    if (!out.errors_defined)
        out.warnings.push_back("n_t < 2: statistical errors are undefined");
    return out;
}

RunResult combine_realizations(const std::vector<RunResult>& realizations) {
    if (realizations.empty()) throw ConfigError("no realizations to combine");
    if (realizations.size() == 1) return realizations.front();
    const RunResult& first = realizations.front();
    const auto r_count = static_cast<double>(realizations.size());

    RunResult out;
    out.times = first.times;
    out.n_t = 0;
    for (const auto& r : realizations) out.n_t += r.n_t;
    out.exact = first.exact;
    out.errors_defined = true;
    out.master_seed = first.master_seed;
    out.config_digest = first.config_digest;
    out.disorder_realizations = static_cast<int>(realizations.size());

    for (const auto& s0 : first.series) {
        ObservableSeries s;
        s.name = s0.name;
        s.estimate.assign(first.times.size(), kNan);
        s.std_error.assign(first.times.size(), kNan);
        for (std::size_t t = 0; t < first.times.size(); ++t) {
            KahanSum sum, sum_sq;
            for (const auto& r : realizations) {
                const double v = r.at(s0.name).estimate[t];
                sum.add(v);
                sum_sq.add(v * v);
            }
            const double mean = sum.value() / r_count;
            const double var =
                std::max(sum_sq.value() / r_count - mean * mean, 0.0) * r_count /
                std::max(r_count - 1.0, 1.0);
            s.estimate[t] = mean;
            s.std_error[t] = std::sqrt(var / r_count);  // realization spread
        }
        out.series.push_back(std::move(s));
    }
    return out;
}

CorrelationProfile correlation_profile(const RunResult& result, int center, Axis a, Axis b) {
    CorrelationProfile profile;
    profile.center = center;

    std::map<int, const ObservableSeries*> pair_series;
    std::vector<std::string> configured;
    for (const auto& s : result.series) {
        if (s.name.rfind("pair_", 0) == 0) configured.push_back(s.name);
    }
    // match names of the form pair_<ab>_<center>_<k>
    const std::string want = std::string("pair_") + axis_name(a) + axis_name(b) + "_" +
                             std::to_string(center) + "_";
    for (const auto& s : result.series) {
        if (s.name.rfind(want, 0) != 0) continue;
        const int k = std::stoi(s.name.substr(want.size()));
        pair_series[k - center] = &s;
    }
    if (pair_series.empty()) {
        std::ostringstream msg;
        msg << "no pair correlators configured for center " << center << "; configured pairs:";
        if (configured.empty()) msg << " (none)";
        for (const auto& name : configured) msg << " " << name;
        throw ConfigError(msg.str());
    }

    const ObservableSeries* mean_c = result.find(site_series_name(a, center));
    if (!mean_c)
        throw ConfigError("site means are required for connected correlators; enable them");

    for (const auto& [offset, series] : pair_series) profile.offsets.push_back(offset);

    profile.values.assign(result.times.size(),
                          std::vector<double>(profile.offsets.size(), kNan));
    for (std::size_t t = 0; t < result.times.size(); ++t) {
        for (std::size_t k = 0; k < profile.offsets.size(); ++k) {
            const int offset = profile.offsets[k];
            const ObservableSeries* pair = pair_series.at(offset);
            const ObservableSeries& mean_j = result.at(site_series_name(b, center + offset));
            profile.values[t][k] =
                pair->estimate[t] - mean_c->estimate[t] * mean_j.estimate[t];
        }
    }
    return profile;
}

}  // namespace dtwa
