#include "dtwa/ensemble.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <memory>
#include <mutex>
#include <sstream>
#include <thread>

#include "dtwa/gaussian.hpp"

namespace dtwa {

namespace {

int resolve_workers(const RunConfig& cfg) {
    if (cfg.workers > 0) return cfg.workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw ? static_cast<int>(hw) : 1;
}

ObservablesRequest observables_request(const RunConfig& cfg, bool keep_xi_samples) {
    ObservablesRequest req;
    req.squeezing = cfg.squeezing;
    req.squeezing_errors = cfg.squeezing && cfg.squeezing_errors && keep_xi_samples;
    req.collective_samples = cfg.dump_trajectories && keep_xi_samples;
    // connected pair correlators need the site means
    req.site_means = cfg.site_means || cfg.pairs.center_to_all ||
                     !cfg.pairs.explicit_pairs.empty();
    req.pairs = cfg.pair_list();
    return req;
}

void check_memory(const RunConfig& cfg, const RealizationSetup& setup,
                  const ObservablesRequest& req, std::uint64_t n_traj) {
    const double n = setup.params.n_spins();
    const double b = std::min<double>(cfg.batch_size, static_cast<double>(n_traj));
    const double n_times = static_cast<double>(setup.times.size());
    const double slots = EnsembleAccumulator::kCollectiveSlots +
                         (req.site_means ? 3.0 * n : 0.0) + 9.0 * req.pairs.size();
    const double n_batches =
        std::ceil(static_cast<double>(n_traj) / std::max(b, 1.0));
    double bytes = 0.0;
    bytes += resolve_workers(cfg) * 10.0 * 3.0 * n * b * 8.0;   // integrator workspaces
    bytes += n_batches * slots * n_times * 32.0;                // batch accumulators
    if (req.squeezing_errors) bytes += static_cast<double>(n_traj) * n_times * 72.0;
    const double mib = bytes / (1024.0 * 1024.0);
    if (mib > cfg.memory_cap_mib) {
        std::ostringstream msg;
        msg << "run would need about " << mib << " MiB (cap " << cfg.memory_cap_mib
            << " MiB); lower n_t, the batch size, or the accumulator requests";
        throw ConfigError(msg.str());
    }
}

// Evolves one batch and feeds every output time into the accumulator.
// `base_trajectory` only decorates divergence errors.
void evolve_batch(const RealizationSetup& setup, SpinBatch& state, double weight,
                  EnsembleAccumulator& acc, const RunConfig& cfg,
                  std::uint64_t realization, std::uint64_t base_trajectory) {
    if (setup.closed_form) {
        ising_closed_form_batch(state, setup.params.j_z, setup.times,
                                [&](int t_index, const SpinBatch& s) {
                                    acc.add_batch(t_index, s, weight);
                                });
        return;
    }
    BatchIntegrator integrator(setup.params, state.n_traj(), setup.dt);
    double t = 0.0;
    for (std::size_t k = 0; k < setup.times.size(); ++k) {
        try {
            integrator.advance(state, t, setup.times[k]);
        } catch (const IntegrationDivergedError& e) {
            for (int c = 0; c < state.n_traj(); ++c) {
                const bool bad = !state.x.col(c).allFinite() ||
                                 !state.y.col(c).allFinite() ||
                                 !state.z.col(c).allFinite();
                if (bad) {
                    const std::uint64_t trajectory = base_trajectory + static_cast<std::uint64_t>(c);
                    const std::uint64_t seed = stream_seed(cfg.master_seed, realization,
                                                           trajectory, StreamKind::trajectory);
                    std::ostringstream msg;
                    msg << e.what() << " in trajectory " << trajectory << " (stream seed 0x"
                        << std::hex << seed << ")";
                    throw IntegrationDivergedError(msg.str(), e.time,
                                                   static_cast<std::int64_t>(trajectory), seed);
                }
            }
            throw;
        }
        t = setup.times[k];
        acc.add_batch(static_cast<int>(k), state, weight);
    }
}

// Fills batch slot `b` of `shards`; trajectories [b*batch, ...) are sampled
// from their private streams so the result is scheduling independent.
template <typename FillColumn>
void run_batches(const RunConfig& cfg, const RealizationSetup& setup,
                 const ObservablesRequest& req, std::uint64_t n_traj, double weight,
                 std::uint64_t realization, const FillColumn& fill_column,
                 EnsembleAccumulator& out) {
    const int n = setup.params.n_spins();
    const auto batch_size = static_cast<std::uint64_t>(cfg.batch_size);
    const auto n_batches =
        static_cast<std::uint64_t>((n_traj + batch_size - 1) / batch_size);
    const int workers =
        static_cast<int>(std::min<std::uint64_t>(resolve_workers(cfg), n_batches));

    std::vector<std::unique_ptr<EnsembleAccumulator>> shards(n_batches);
    std::atomic<std::uint64_t> next_batch{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto work = [&]() {
        try {
            while (true) {
                const std::uint64_t b = next_batch.fetch_add(1);
                if (b >= n_batches) break;
                {
                    std::lock_guard<std::mutex> lock(error_mutex);
                    if (first_error) break;
                }
                const std::uint64_t base = b * batch_size;
                const int count = static_cast<int>(std::min(batch_size, n_traj - base));
                SpinBatch state(n, count);
                for (int c = 0; c < count; ++c)
                    fill_column(base + static_cast<std::uint64_t>(c), state, c);
                auto acc = std::make_unique<EnsembleAccumulator>(
                    n, static_cast<int>(setup.times.size()), req);
                evolve_batch(setup, state, weight, *acc, cfg, realization, base);
                shards[b] = std::move(acc);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    // fixed-order reduction: shard index, not worker order
    for (std::uint64_t b = 0; b < n_batches; ++b) out.merge(*shards[b]);
}

void attach_metadata(RunResult& result, const RunConfig& cfg,
                     const RealizationSetup& setup) {
    result.master_seed = cfg.master_seed;
    result.config_digest = config_digest(cfg);
    if (!setup.closed_form) {
        if (const auto warning = step_warning(setup.params, setup.dt))
            result.warnings.push_back(*warning);
    }
}

// --- exact enumeration of pure Ising models over frozen-z assignments ---
//
// For J_perp = 0, Omega = 0 each transverse spin rotates about z by
// phi_n = 2 t (Jz z)_n with z conserved, so the two unpinned +-1 components
// of every site can be averaged analytically. Per site that leaves first
// moments m(t) (rotation of the pinned components) and on-site second
// moments q with q_aa = 1, q_xy = 0, q_az = m_a m_z for a = x, y.
struct IsingSupport {
    std::vector<int> enumerated_sites;  // sites whose s^z is a free +-1 bit
    Eigen::VectorXd fixed_z;            // pinned s^z for z-polarized sites, else 0
    Eigen::VectorXd m0x, m0y;           // pinned transverse components at t = 0
};

IsingSupport ising_support(const ProductState& initial) {
    const int n = initial.n_sites();
    IsingSupport support;
    support.fixed_z = Eigen::VectorXd::Zero(n);
    support.m0x = Eigen::VectorXd::Zero(n);
    support.m0y = Eigen::VectorXd::Zero(n);
    for (int i = 0; i < n; ++i) {
        const auto& p = initial.site(i);
        switch (p.axis) {
            case Axis::x:
                support.m0x[i] = static_cast<double>(p.sign);
                support.enumerated_sites.push_back(i);
                break;
            case Axis::y:
                support.m0y[i] = static_cast<double>(p.sign);
                support.enumerated_sites.push_back(i);
                break;
            default:
                support.fixed_z[i] = static_cast<double>(p.sign);
                break;
        }
    }
    return support;
}

RunResult run_enumerated_ising(const RunConfig& cfg, const RealizationSetup& setup) {
    const int n = setup.params.n_spins();
    const IsingSupport support = ising_support(setup.initial);
    const int bits = static_cast<int>(support.enumerated_sites.size());
    if (bits > 62)
        throw EnumerationCapError("Ising enumeration support exceeds 2^62; use sampling");
    const std::uint64_t total = std::uint64_t{1} << bits;
    if (total > cfg.enumeration_cap) {
        std::ostringstream msg;
        msg << "Ising enumeration support 2^" << bits << " = " << total << " exceeds cap "
            << cfg.enumeration_cap << "; raise the cap or use Monte Carlo sampling";
        throw EnumerationCapError(msg.str());
    }
    const double weight = std::pow(0.5, bits);
    const ObservablesRequest req = observables_request(cfg, /*keep_xi_samples=*/false);

    const auto batch_size = static_cast<std::uint64_t>(cfg.batch_size);
    const auto n_batches = (total + batch_size - 1) / batch_size;
    const int workers =
        static_cast<int>(std::min<std::uint64_t>(resolve_workers(cfg), n_batches));

    std::vector<std::unique_ptr<EnsembleAccumulator>> shards(n_batches);
    std::atomic<std::uint64_t> next_batch{0};
    std::mutex error_mutex;
    std::exception_ptr first_error;

    auto work = [&]() {
        try {
            Eigen::VectorXd z(n);
            FactorizedMoments f(n);
            while (true) {
                const std::uint64_t b = next_batch.fetch_add(1);
                if (b >= n_batches) break;
                const std::uint64_t base = b * batch_size;
                const auto count = std::min(batch_size, total - base);
                auto acc = std::make_unique<EnsembleAccumulator>(
                    n, static_cast<int>(setup.times.size()), req);
                for (std::uint64_t k = 0; k < count; ++k) {
                    const std::uint64_t index = base + k;
                    z = support.fixed_z;
                    for (int bit = 0; bit < bits; ++bit)
                        z[support.enumerated_sites[static_cast<std::size_t>(bit)]] =
                            ((index >> bit) & 1u) ? 1.0 : -1.0;
                    const Eigen::VectorXd beta = setup.params.j_z.values() * z;
                    for (std::size_t ti = 0; ti < setup.times.size(); ++ti) {
                        const Eigen::ArrayXd phi = (2.0 * setup.times[ti]) * beta.array();
                        const Eigen::ArrayXd c = phi.cos();
                        const Eigen::ArrayXd s = phi.sin();
                        f.mx = (c * support.m0x.array() - s * support.m0y.array()).matrix();
                        f.my = (s * support.m0x.array() + c * support.m0y.array()).matrix();
                        f.mz = z;
                        f.qxx.setOnes();
                        f.qyy.setOnes();
                        f.qzz.setOnes();
                        f.qxy.setZero();
                        f.qxz = f.mx.cwiseProduct(z);
                        f.qyz = f.my.cwiseProduct(z);
                        acc->add_factorized(static_cast<int>(ti), f, weight);
                    }
                }
                shards[b] = std::move(acc);
            }
        } catch (...) {
            std::lock_guard<std::mutex> lock(error_mutex);
            if (!first_error) first_error = std::current_exception();
        }
    };

    if (workers <= 1) {
        work();
    } else {
        std::vector<std::thread> pool;
        for (int w = 0; w < workers; ++w) pool.emplace_back(work);
        for (auto& th : pool) th.join();
    }
    if (first_error) std::rethrow_exception(first_error);

    EnsembleAccumulator acc(n, static_cast<int>(setup.times.size()), req);
    for (std::uint64_t b = 0; b < n_batches; ++b) acc.merge(*shards[b]);
    RunResult result = summarize(acc, setup.times);
    result.n_t = total;
    attach_metadata(result, cfg, setup);
    return result;
}

}  // namespace

RealizationSetup build_realization(const RunConfig& cfg, int realization) {
    cfg.validate();
    auto dilution_rng = make_stream(cfg.master_seed, static_cast<std::uint64_t>(realization),
                                    0, StreamKind::dilution);
    std::vector<Eigen::Vector3d> sites = build_sites(cfg.lattice, dilution_rng);
    CouplingMatrix base = build_couplings(sites, cfg.j, cfg.alpha, cfg.mode,
                                          cfg.lattice.quantization_axis);
    const int n = static_cast<int>(sites.size());

    CouplingMatrix j_perp = CouplingMatrix::zero(n);
    CouplingMatrix j_z = CouplingMatrix::zero(n);
    switch (cfg.kind) {
        case ModelKind::ising:
            j_z = base;
            break;
        case ModelKind::xy:
            j_perp = base;
            break;
        case ModelKind::xxz:
            j_perp = base.scaled(cfg.j_perp_factor);
            j_z = base.scaled(cfg.j_z_factor);
            break;
    }

    RealizationSetup setup{
        std::move(sites),
        ModelParams(std::move(j_perp), std::move(j_z), cfg.omega),
        cfg.initial_state(),
        cfg.time.grid(),
        0.0,
        false,
    };
    setup.dt = cfg.time.dt.value_or(IntegratorConfig::default_dt(setup.params));
    setup.closed_form = setup.params.pure_ising() && !cfg.time.force_integrator;
    return setup;
}

RunResult run_ensemble_realization(const RunConfig& cfg, int realization) {
    const RealizationSetup setup = build_realization(cfg, realization);
    const ObservablesRequest req = observables_request(cfg, /*keep_xi_samples=*/true);
    check_memory(cfg, setup, req, cfg.n_t);

    const auto real_idx = static_cast<std::uint64_t>(realization);
    auto fill_column = [&](std::uint64_t trajectory, SpinBatch& state, int column) {
        auto rng = make_stream(cfg.master_seed, real_idx, trajectory, StreamKind::trajectory);
        if (cfg.sampler == SamplerKind::dtwa)
            sample_initial_column(setup.initial, rng, state, column);
        else
            sample_gaussian_initial_column(setup.initial, rng, state, column);
    };

    EnsembleAccumulator acc(setup.params.n_spins(), static_cast<int>(setup.times.size()), req);
    run_batches(cfg, setup, req, cfg.n_t, 1.0, real_idx, fill_column, acc);
    RunResult result = summarize(acc, setup.times);
    if (cfg.dump_trajectories && acc.has_xi_samples()) {
        result.trajectory_samples.reserve(setup.times.size());
        for (std::size_t t = 0; t < setup.times.size(); ++t)
            result.trajectory_samples.push_back(acc.xi_samples(static_cast<int>(t)));
    }
    attach_metadata(result, cfg, setup);
    return result;
}

RunResult run_ensemble(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.disorder_realizations == 1) return run_ensemble_realization(cfg, 0);
    std::vector<RunResult> per_realization;
    per_realization.reserve(static_cast<std::size_t>(cfg.disorder_realizations));
    for (int r = 0; r < cfg.disorder_realizations; ++r)
        per_realization.push_back(run_ensemble_realization(cfg, r));
    RunResult combined = combine_realizations(per_realization);
    combined.master_seed = cfg.master_seed;
    combined.config_digest = config_digest(cfg);
    return combined;
}

RunResult run_enumerated(const RunConfig& cfg) {
    cfg.validate();
    if (cfg.sampler != SamplerKind::dtwa)
        throw ConfigError("only the discrete sampler has an enumerable support");
    const RealizationSetup setup = build_realization(cfg, 0);

    if (setup.params.pure_ising() && !cfg.time.force_integrator)
        return run_enumerated_ising(cfg, setup);

    const InitialEnumeration enumeration(setup.initial, cfg.enumeration_cap);
    const ObservablesRequest req = observables_request(cfg, /*keep_xi_samples=*/false);

    auto fill_column = [&](std::uint64_t index, SpinBatch& state, int column) {
        enumeration.fill_column(index, state, column);
    };
    EnsembleAccumulator acc(setup.params.n_spins(), static_cast<int>(setup.times.size()), req);
    run_batches(cfg, setup, req, enumeration.size(), enumeration.weight(), 0, fill_column,
                acc);
    RunResult result = summarize(acc, setup.times);
    result.n_t = enumeration.size();
    attach_metadata(result, cfg, setup);
    return result;
}

ConvergenceResult convergence_sweep(const RunConfig& cfg,
                                    std::vector<std::uint64_t> n_t_list) {
    if (n_t_list.size() < 2)
        throw ConfigError("convergence sweep needs at least two trajectory counts");
    std::sort(n_t_list.begin(), n_t_list.end());
    n_t_list.erase(std::unique(n_t_list.begin(), n_t_list.end()), n_t_list.end());

    std::vector<RunResult> runs;
    runs.reserve(n_t_list.size());
    for (std::size_t p = 0; p < n_t_list.size(); ++p) {
        RunConfig point = cfg;
        point.n_t = n_t_list[p];
        // independent streams per sweep point so deviations from the
        // reference stay uncorrelated
        point.master_seed = mix64(cfg.master_seed ^ (0x636F6E76ULL + p));
        point.squeezing_errors = false;
        point.site_means = false;
        point.pairs = {};
        runs.push_back(run_ensemble(point));
    }

    const RunResult& reference = runs.back();
    auto curve_scale = [&](const char* name) {
        double scale = 0.0;
        for (double v : reference.at(name).estimate) scale = std::max(scale, std::abs(v));
        return std::max(scale, 1e-300);
    };
    const double sx_scale = curve_scale("Sx");
    const double xi_scale = cfg.squeezing ? curve_scale("xi") : 1.0;

    ConvergenceResult out;
    out.reference_n_t = n_t_list.back();
    for (std::size_t p = 0; p + 1 < runs.size(); ++p) {
        ConvergencePoint point;
        point.n_t = n_t_list[p];
        double dev_sx = 0.0;
        double dev_xi = 0.0;
        const auto& sx = runs[p].at("Sx").estimate;
        const auto& sx_ref = reference.at("Sx").estimate;
        for (std::size_t t = 0; t < sx.size(); ++t)
            dev_sx = std::max(dev_sx, std::abs(sx[t] - sx_ref[t]));
        point.dev_sx = dev_sx / sx_scale;
        if (cfg.squeezing) {
            const auto& xi = runs[p].at("xi").estimate;
            const auto& xi_ref = reference.at("xi").estimate;
            for (std::size_t t = 0; t < xi.size(); ++t) {
                if (std::isnan(xi[t]) || std::isnan(xi_ref[t])) continue;
                dev_xi = std::max(dev_xi, std::abs(xi[t] - xi_ref[t]));
            }
            point.dev_xi = dev_xi / xi_scale;
        }
        out.points.push_back(point);
    }

    auto fit_slope = [&](auto value_of) {
        double sum_x = 0.0, sum_y = 0.0, sum_xx = 0.0, sum_xy = 0.0;
        int count = 0;
        for (const auto& p : out.points) {
            const double v = value_of(p);
            if (!(v > 0.0)) continue;
            const double x = std::log(static_cast<double>(p.n_t));
            const double y = std::log(v);
            sum_x += x;
            sum_y += y;
            sum_xx += x * x;
            sum_xy += x * y;
            ++count;
        }
        if (count < 2) return 0.0;
        const double denom = count * sum_xx - sum_x * sum_x;
        return (count * sum_xy - sum_x * sum_y) / denom;
    };
    out.slope_sx = fit_slope([](const ConvergencePoint& p) { return p.dev_sx; });
    out.slope_xi = fit_slope([](const ConvergencePoint& p) { return p.dev_xi; });
    return out;
}

std::vector<FillingPoint> sweep_filling(const RunConfig& cfg,
                                        const std::vector<double>& fillings) {
    if (fillings.empty()) throw ConfigError("filling sweep needs at least one filling");
    if (!cfg.squeezing) throw ConfigError("filling sweep reports xi; enable squeezing");
    std::vector<FillingPoint> out;
    out.reserve(fillings.size());
    for (double filling : fillings) {
        RunConfig point = cfg;
        point.lattice.filling = filling;
        point.validate();
        KahanSum sum, sum_sq;
        for (int r = 0; r < cfg.disorder_realizations; ++r) {
            const RunResult result = run_ensemble_realization(point, r);
            const auto& xi = result.at("xi").estimate;
            double min_xi = std::numeric_limits<double>::infinity();
            for (double v : xi)
                if (!std::isnan(v)) min_xi = std::min(min_xi, v);
            sum.add(min_xi);
            sum_sq.add(min_xi * min_xi);
        }
        const auto r_count = static_cast<double>(cfg.disorder_realizations);
        FillingPoint fp;
        fp.filling = filling;
        fp.realizations = cfg.disorder_realizations;
        fp.min_xi_mean = sum.value() / r_count;
        const double var =
            std::max(sum_sq.value() / r_count - fp.min_xi_mean * fp.min_xi_mean, 0.0);
        fp.min_xi_spread =
            r_count > 1.0 ? std::sqrt(var / (r_count - 1.0)) : std::numeric_limits<double>::quiet_NaN();
        out.push_back(fp);
    }
    return out;
}

}  // namespace dtwa
