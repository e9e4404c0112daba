// Acceptance suite: end-to-end checks of the trajectory method against its
// exact references, one numbered criterion per function. Each criterion
// prints a single [PASS]/[FAIL] line; the exit code is the failure count.
//
// Usage: acceptance [id ...]   (no arguments: run everything)

#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "dtwa/ensemble.hpp"
#include "dtwa/gaussian.hpp"
#include "dtwa/oracle.hpp"
#include "dtwa/output.hpp"

using namespace dtwa;

namespace {

struct Checker {
    int failures = 0;

    void expect(bool ok, const char* what) {
        if (!ok) {
            ++failures;
            std::printf("    [fail] %s\n", what);
        }
    }
    void expect_le(double value, double bound, const char* what) {
        if (!(value <= bound)) {
            ++failures;
            std::printf("    [fail] %s: %.3e > %.3e\n", what, value, bound);
        }
    }
    void expect_lt(double value, double bound, const char* what) {
        if (!(value < bound)) {
            ++failures;
            std::printf("    [fail] %s: %.3e >= %.3e\n", what, value, bound);
        }
    }
    void expect_gt(double value, double bound, const char* what) {
        if (!(value > bound)) {
            ++failures;
            std::printf("    [fail] %s: %.3e <= %.3e\n", what, value, bound);
        }
    }
};

std::vector<double> linspace(double t_max, int n) {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int k = 0; k < n; ++k)
        out[static_cast<std::size_t>(k)] = t_max * static_cast<double>(k) / (n - 1);
    return out;
}

RunConfig chain_config(int n, ModelKind kind, double alpha, CouplingMode mode) {
    RunConfig cfg;
    cfg.lattice.extents = {n, 1, 1};
    cfg.kind = kind;
    cfg.alpha = alpha;
    cfg.mode = mode;
    cfg.j = 1.0;
    cfg.site_means = false;
    cfg.squeezing = false;
    return cfg;
}

// ---------------------------------------------------------------------------
// 1. Ising one-point exactness: the enumerated sampler equals the analytic
//    product solution to 1e-10; a sampled run stays within 3 standard errors.

void criterion_1(Checker& check) {
    const auto start = std::chrono::steady_clock::now();
    const int n = 16;
    struct Case {
        double alpha;
        CouplingMode mode;
    };
    for (const Case& c : {Case{0.0, CouplingMode::isotropic}, Case{3.0, CouplingMode::dipolar}}) {
        RunConfig cfg = chain_config(n, ModelKind::ising, c.alpha, c.mode);
        cfg.site_means = true;
        cfg.time.t_max = 4.0;
        cfg.time.n_out = 50;
        cfg.enumeration_cap = std::uint64_t{1} << 17;

        const auto setup = build_realization(cfg, 0);
        const auto exact_site = [&](double t, int i) {
            return oracle::exact_ising_sx(setup.params.j_z, t, i);
        };

        const RunResult enumerated = run_enumerated(cfg);
        check.expect(enumerated.n_t == 65536, "enumeration covers 2^16 assignments");
        double worst = 0.0;
        for (std::size_t t = 0; t < enumerated.times.size(); ++t)
            for (int i = 0; i < n; ++i)
                worst = std::max(
                    worst, std::abs(enumerated.at(site_series_name(Axis::x, i)).estimate[t] -
                                    exact_site(enumerated.times[t], i)));
        check.expect_le(worst, 1e-10, "enumerated <sigma_n^x> vs analytic product");

        cfg.n_t = 8000;
        cfg.master_seed = 402;
        const RunResult sampled = run_ensemble(cfg);
        int outside = 0;
        for (std::size_t t = 0; t < sampled.times.size(); ++t) {
            for (int i = 0; i < n; ++i) {
                const auto& series = sampled.at(site_series_name(Axis::x, i));
                const double dev =
                    std::abs(series.estimate[t] - exact_site(sampled.times[t], i));
                if (dev > 3.0 * series.std_error[t] + 1e-12) ++outside;
            }
        }
        check.expect(outside == 0, "sampled <sigma_n^x> within 3 standard errors everywhere");
    }
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    check.expect_lt(seconds, 60.0, "criterion runtime under one minute");
}

// ---------------------------------------------------------------------------
// 2. All-to-all revival at t = pi/(2J): the discrete sampler returns to full
//    magnetization; the Gaussian baseline has fully dephased.

void criterion_2(Checker& check) {
    const int n = 15;
    RunConfig cfg = chain_config(n, ModelKind::ising, 0.0, CouplingMode::isotropic);
    const double t_revival = std::numbers::pi / 2.0;
    cfg.time.times = std::vector<double>{0.0, 0.25 * t_revival, 0.5 * t_revival, t_revival};
    cfg.enumeration_cap = std::uint64_t{1} << 16;

    const RunResult enumerated = run_enumerated(cfg);
    const double revival =
        std::abs(enumerated.at("Sx_per_spin").estimate[3]);
    check.expect_le(std::abs(revival - 1.0), 1e-8, "enumerated |<S_x>|/N revives to 1");

    cfg.sampler = SamplerKind::gaussian;
    cfg.n_t = 4000;
    cfg.master_seed = 42;
    const RunResult gaussian = run_ensemble(cfg);
    check.expect_lt(std::abs(gaussian.at("Sx_per_spin").estimate[3]), 0.2,
                    "Gaussian baseline misses the revival");
}

// ---------------------------------------------------------------------------
// 3. Two-point sampling error law: enumerated pair correlators equal
//    exact * cos^2(2 t J_ij); Delta S_x inherits the error while Re<S_y S_z>
//    stays exact.

void criterion_3(Checker& check) {
    const int n = 8;
    RunConfig cfg = chain_config(n, ModelKind::ising, 3.0, CouplingMode::dipolar);
    cfg.site_means = true;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) cfg.pairs.explicit_pairs.push_back({i, j});
    cfg.time.t_max = 2.0;
    cfg.time.n_out = 20;

    const auto setup = build_realization(cfg, 0);
    const auto& jz = setup.params.j_z;
    const RunResult result = run_enumerated(cfg);

    double worst_pair = 0.0;
    for (std::size_t t = 0; t < result.times.size(); ++t) {
        const double time = result.times[t];
        for (int i = 0; i < n; ++i) {
            for (int j = i + 1; j < n; ++j) {
                const double xx = result.at(pair_series_name(Axis::x, Axis::x, i, j)).estimate[t];
                const double xy = result.at(pair_series_name(Axis::x, Axis::y, i, j)).estimate[t];
                const double yx = result.at(pair_series_name(Axis::y, Axis::x, i, j)).estimate[t];
                const double yy = result.at(pair_series_name(Axis::y, Axis::y, i, j)).estimate[t];
                for (int s1 : {+1, -1}) {
                    for (int s2 : {+1, -1}) {
                        const std::complex<double> sampled(0.25 * (xx - s1 * s2 * yy),
                                                           0.25 * (s2 * xy + s1 * yx));
                        const auto expected =
                            oracle::dtwa_limit_ising_corr(jz, time, i, j, s1, s2);
                        worst_pair = std::max(worst_pair, std::abs(sampled - expected));
                    }
                }
            }
        }
    }
    check.expect_le(worst_pair, 1e-10,
                    "enumerated <sigma^s1 sigma^s2> vs exact * cos^2(2 t J_ij)");

    // Delta S_x deviates from the quantum solution...
    double worst_var = 0.0;
    double worst_sysz = 0.0;
    for (std::size_t t = 0; t < result.times.size(); ++t) {
        const double time = result.times[t];
        worst_var = std::max(worst_var, std::abs(result.at("var_Sx").estimate[t] -
                                                 oracle::exact_ising_var_sx(jz, time)));
        worst_sysz = std::max(worst_sysz, std::abs(result.at("SySz").estimate[t] -
                                                   oracle::exact_ising_re_sysz(jz, time)));
    }
    check.expect_gt(worst_var, 0.01, "Delta S_x carries the documented sampling error");
    // ...while Re<S_y S_z> matches exactly
    check.expect_le(worst_sysz, 1e-10, "Re<S_y S_z> agrees with the exact solution");

    // belt and braces: the analytic Re<S_y S_z> itself against the quantum
    // reference at a midpoint time
    const std::vector<double> probe{result.times[result.times.size() / 2]};
    const auto states = oracle::ed_evolve(setup.params, setup.initial, probe);
    const auto obs = oracle::ed_observables(states[0]);
    check.expect_le(std::abs(obs.second_moments(1, 2) -
                             oracle::exact_ising_re_sysz(jz, probe[0])),
                    1e-9, "analytic Re<S_y S_z> vs exact diagonalization");
}

// ---------------------------------------------------------------------------
// 4. XY short-time accuracy: sampled magnetization within 0.02 per spin of
//    the quantum solution for tJ <= 0.4; the Gaussian baseline breaks before
//    tJ = 0.2.

void criterion_4(Checker& check) {
    const int n = 10;
    RunConfig cfg = chain_config(n, ModelKind::xy, 3.0, CouplingMode::dipolar);
    cfg.time.t_max = 0.4;
    cfg.time.n_out = 21;
    cfg.n_t = 16000;
    cfg.master_seed = 1213;

    const auto setup = build_realization(cfg, 0);
    const auto states = oracle::ed_evolve(setup.params, setup.initial, setup.times);
    std::vector<double> ed_sx;
    ed_sx.reserve(states.size());
    for (const auto& state : states)
        ed_sx.push_back(oracle::ed_observables(state).collective.x() / n);

    const RunResult sampled = run_ensemble(cfg);
    double worst = 0.0;
    for (std::size_t t = 0; t < sampled.times.size(); ++t)
        worst = std::max(worst,
                         std::abs(sampled.at("Sx_per_spin").estimate[t] - ed_sx[t]));
    check.expect_le(worst, 0.02, "sampled <S_x>/N within 0.02 of ED for tJ <= 0.4");

    cfg.sampler = SamplerKind::gaussian;
    const RunResult gaussian = run_ensemble(cfg);
    double gauss_dev_before_02 = 0.0;
    for (std::size_t t = 0; t < gaussian.times.size(); ++t) {
        if (gaussian.times[t] > 0.2 + 1e-12) break;
        gauss_dev_before_02 = std::max(
            gauss_dev_before_02, std::abs(gaussian.at("Sx_per_spin").estimate[t] - ed_sx[t]));
    }
    std::printf("    note: the factorized Gaussian baseline matches per-site second "
                "moments, so its <S_x>/N deviation before tJ = 0.2 is %.2e here; the "
                "magnetization failure this bound expects requires collective-noise "
                "sampling (the revival and squeezing checks carry the qualitative miss)\n",
                gauss_dev_before_02);
    check.expect_gt(gauss_dev_before_02, 0.02,
                    "Gaussian baseline deviates by more than 0.02 before tJ = 0.2");
}

// ---------------------------------------------------------------------------
// 5. Squeezing witness: xi(0) = 1 within errors, the achievable minimum
//    matches ED within 10%, and agreement improves with interaction range.

void criterion_5(Checker& check) {
    const int n = 12;
    std::vector<double> relative_errors;
    for (double alpha : {0.0, 1.0, 3.0}) {
        RunConfig cfg = chain_config(n, ModelKind::xy, alpha,
                                     alpha == 0.0 ? CouplingMode::isotropic
                                                  : CouplingMode::dipolar);
        cfg.squeezing = true;
        cfg.squeezing_errors = true;
        cfg.time.t_max = 1.0;
        cfg.time.n_out = 51;
        cfg.n_t = 8000;
        cfg.master_seed = 515;

        const auto setup = build_realization(cfg, 0);
        const auto states = oracle::ed_evolve(setup.params, setup.initial, setup.times);
        double ed_min = std::numeric_limits<double>::infinity();
        for (const auto& state : states) {
            const auto obs = oracle::ed_observables(state);
            if (obs.xi_defined) ed_min = std::min(ed_min, obs.xi);
        }

        const RunResult sampled = run_ensemble(cfg);
        const auto& xi = sampled.at("xi");
        check.expect_le(std::abs(xi.estimate[0] - 1.0), 3.0 * xi.std_error[0],
                        "xi(0) = 1 within statistical error");
        double dtwa_min = std::numeric_limits<double>::infinity();
        for (double v : xi.estimate)
            if (!std::isnan(v)) dtwa_min = std::min(dtwa_min, v);

        const double rel = std::abs(dtwa_min - ed_min) / ed_min;
        std::printf("    alpha=%.0f: min xi ED %.4f, sampled %.4f, rel err %.3f\n", alpha,
                    ed_min, dtwa_min, rel);
        check.expect_le(rel, 0.10, "min_t xi within 10% of ED");
        check.expect_gt(ed_min, 0.0, "ED minimum is positive");
        relative_errors.push_back(rel);
    }
    check.expect(relative_errors[0] <= relative_errors[1] + 1e-12 &&
                     relative_errors[1] <= relative_errors[2] + 1e-12,
                 "agreement improves monotonically with interaction range");
}

// ---------------------------------------------------------------------------
// 6. Statistical convergence: max deviation from the largest run falls like
//    1/sqrt(n_t) for both <S_x> and xi, with the one-body observable always
//    converging better.

void criterion_6(Checker& check) {
    RunConfig cfg;
    cfg.lattice.extents = {4, 4, 1};
    cfg.kind = ModelKind::xy;
    cfg.alpha = 1.0;
    cfg.mode = CouplingMode::isotropic;
    cfg.squeezing = true;
    cfg.site_means = false;
    // the squeezing window: xi dips to its minimum and recovers to O(1);
    // past it |<S>| collapses and the xi estimator variance explodes
    cfg.time.t_max = 0.5;
    cfg.time.n_out = 26;
    cfg.time.dt = 2e-3;

    // average the max deviations over independent repetitions before fitting
    const std::vector<std::uint64_t> counts{500, 1000, 2000, 4000, 8000, 16000, 32000, 64000};
    const int repetitions = 4;
    std::vector<double> dev_sx(counts.size() - 1, 0.0);
    std::vector<double> dev_xi(counts.size() - 1, 0.0);
    for (int rep = 0; rep < repetitions; ++rep) {
        cfg.master_seed = 616 + static_cast<std::uint64_t>(rep);
        const auto sweep = convergence_sweep(cfg, counts);
        for (std::size_t p = 0; p < sweep.points.size(); ++p) {
            dev_sx[p] += sweep.points[p].dev_sx / repetitions;
            dev_xi[p] += sweep.points[p].dev_xi / repetitions;
        }
    }

    auto fit_slope = [&](const std::vector<double>& dev) {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        for (std::size_t p = 0; p < dev.size(); ++p) {
            const double x = std::log(static_cast<double>(counts[p]));
            const double y = std::log(dev[p]);
            sx += x;
            sy += y;
            sxx += x * x;
            sxy += x * y;
        }
        const double n = static_cast<double>(dev.size());
        return (n * sxy - sx * sy) / (n * sxx - sx * sx);
    };
    const double slope_sx = fit_slope(dev_sx);
    const double slope_xi = fit_slope(dev_xi);
    std::printf("    slope(Sx) = %.3f, slope(xi) = %.3f over %d repetitions\n", slope_sx,
                slope_xi, repetitions);
    for (std::size_t p = 0; p + 1 < counts.size(); ++p) {
        std::printf("    n_t %6llu: dev Sx %.3e, dev xi %.3e\n",
                    static_cast<unsigned long long>(counts[p]), dev_sx[p], dev_xi[p]);
        check.expect_lt(dev_sx[p], dev_xi[p],
                        "<S_x> deviations below xi deviations at every n_t");
    }
    check.expect_le(std::abs(slope_sx + 0.5), 0.1, "log-log slope of <S_x> is -0.5 +- 0.1");
    check.expect_le(std::abs(slope_xi + 0.5), 0.1, "log-log slope of xi is -0.5 +- 0.1");
}

// ---------------------------------------------------------------------------
// 7. Conservation suite over random models: per-spin norm, classical energy,
//    total s^z (without a field), and frozen s^z in the pure Ising limit.

void criterion_7(Checker& check) {
    auto rng = make_stream(717, 0, 0, StreamKind::trajectory);
    double worst_norm = 0.0, worst_energy = 0.0, worst_rhs_sz = 0.0, worst_sz = 0.0;
    bool ising_z_frozen = true;

    for (int trial = 0; trial < 100; ++trial) {
        RunConfig cfg;
        const int length = 4 + static_cast<int>(rng.below(9));  // 4..12 cells
        const bool planar = rng.sign() > 0;
        cfg.lattice.extents = {length, planar ? 2 : 1, 1};
        cfg.lattice.filling = (trial % 3 == 0) ? 0.75 : 1.0;
        if (cfg.lattice.n_sites() < 2) cfg.lattice.filling = 1.0;
        cfg.alpha = 3.0 * rng.uniform();
        cfg.mode = rng.sign() > 0 ? CouplingMode::dipolar : CouplingMode::isotropic;
        const int kind_draw = static_cast<int>(rng.below(3));
        cfg.kind = kind_draw == 0 ? ModelKind::ising
                                  : (kind_draw == 1 ? ModelKind::xy : ModelKind::xxz);
        cfg.omega = (trial % 2 == 0) ? 0.0 : 2.0 * rng.uniform();
        cfg.master_seed = 7000 + static_cast<std::uint64_t>(trial);
        const char* axes[6] = {"+x", "-x", "+y", "-y", "+z", "-z"};
        cfg.initial_axes = {parse_axis(axes[rng.below(6)])};

        const auto setup = build_realization(cfg, 0);
        auto traj_rng = make_stream(cfg.master_seed, 0, 0, StreamKind::trajectory);
        const SpinConfiguration initial = sample_initial(setup.initial, traj_rng);

        // the analytic conservation laws of the derivative itself
        const auto d = eom_rhs(initial, setup.params);
        if (cfg.omega == 0.0)
            worst_rhs_sz = std::max(worst_rhs_sz, std::abs(d.z.sum()));
        if (setup.params.pure_ising())
            for (int i = 0; i < initial.n_sites(); ++i)
                if (d.z[i] != 0.0) ising_z_frozen = false;

        IntegratorConfig icfg;
        icfg.force_integrator = true;
        // resolve the worst-case precession rate: random all-to-all draws
        // carry row sums far above the bare coupling scale the default step
        // is tuned for (they trip the step warning)
        icfg.dt = std::min(IntegratorConfig::default_dt(setup.params),
                           0.01 / setup.params.max_field_bound());
        const std::vector<double> times{0.25, 0.5, 0.75, 1.0};
        const auto states = integrate(initial, setup.params, icfg, times);
        const double e0 = classical_energy(initial, setup.params);
        for (const auto& state : states) {
            for (int i = 0; i < state.n_sites(); ++i)
                worst_norm = std::max(worst_norm, std::abs(state.norm2(i) - 3.0));
            worst_energy =
                std::max(worst_energy, std::abs(classical_energy(state, setup.params) - e0));
        }
        if (cfg.omega == 0.0)
            worst_sz = std::max(worst_sz, std::abs(states.back().z.sum() - initial.z.sum()));
        if (setup.params.pure_ising())
            for (int i = 0; i < initial.n_sites(); ++i)
                if (states.back().z[i] != initial.z[i]) ising_z_frozen = false;
    }
    std::printf("    worst norm drift %.2e, energy drift %.2e, rhs sum(s^z) %.2e, "
                "sum(s^z) drift %.2e\n",
                worst_norm, worst_energy, worst_rhs_sz, worst_sz);
    check.expect_le(worst_norm, 1e-8, "per-spin norm drift below 1e-8 per unit time");
    check.expect_le(worst_energy, 1e-8, "classical energy drift below 1e-8");
    check.expect_le(worst_rhs_sz, 1e-11, "derivative conserves total s^z analytically");
    check.expect_le(worst_sz, 1e-8, "integrated total s^z drift below 1e-8");
    check.expect(ising_z_frozen, "every s^z_n frozen in the pure Ising limit");
}

// ---------------------------------------------------------------------------
// 8. Scale demonstration: a 20x20 transverse-plane run finishes within the
//    budget; an 80x80 smoke run is gated behind DTWA_XL=1.

void criterion_8(Checker& check) {
    RunConfig cfg;
    cfg.lattice.extents = {20, 20, 1};
    cfg.kind = ModelKind::xy;
    cfg.alpha = 1.0;
    cfg.mode = CouplingMode::isotropic;
    cfg.squeezing = true;
    cfg.squeezing_errors = false;
    cfg.site_means = false;
    cfg.time.t_max = 1.0;
    cfg.time.n_out = 26;
    cfg.n_t = 1000;
    cfg.master_seed = 818;
    cfg.memory_cap_mib = 4096.0;

    const auto start = std::chrono::steady_clock::now();
    const RunResult result = run_ensemble(cfg);
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("    20x20 run: %.1f s for %llu trajectories\n", seconds,
                static_cast<unsigned long long>(result.n_t));
    check.expect_lt(seconds, 600.0, "20x20, n_t = 1000, tJ in [0,1] inside 10 minutes");
    check.expect(result.at("Sx_per_spin").estimate[0] == 1.0, "pinned initial magnetization");
    // plug-in minimum-eigenvalue estimate of xi biases low at finite n_t
    const double xi0 = result.at("xi").estimate[0];
    check.expect_le(std::abs(xi0 - 1.0), 0.1, "xi(0) consistent with a coherent state");
    for (double v : result.at("xi").estimate) check.expect(std::isfinite(v), "xi stays finite");

    if (const char* xl = std::getenv("DTWA_XL"); xl && std::strcmp(xl, "1") == 0) {
        cfg.lattice.extents = {80, 80, 1};
        cfg.memory_cap_mib = 16384.0;
        const auto xl_start = std::chrono::steady_clock::now();
        const RunResult xl_result = run_ensemble(cfg);
        const double xl_seconds = std::chrono::duration<double>(
                                      std::chrono::steady_clock::now() - xl_start)
                                      .count();
        std::printf("    80x80 smoke run: %.1f s, xi_min %.3f\n", xl_seconds,
                    *std::min_element(xl_result.at("xi").estimate.begin(),
                                      xl_result.at("xi").estimate.end()));
    } else {
        std::printf("    (80x80 smoke run skipped; set DTWA_XL=1 to enable)\n");
    }
}

// ---------------------------------------------------------------------------
// 9. Determinism: identical configs produce byte-identical CSV no matter how
//    many workers execute them.

void criterion_9(Checker& check) {
    RunConfig cfg;
    cfg.lattice.extents = {10, 1, 1};
    cfg.kind = ModelKind::xy;
    cfg.alpha = 1.0;
    cfg.squeezing = true;
    cfg.squeezing_errors = true;
    cfg.site_means = true;
    cfg.pairs.center_to_all = true;
    cfg.time.t_max = 0.5;
    cfg.time.n_out = 11;
    cfg.n_t = 512;
    cfg.batch_size = 64;
    cfg.master_seed = 919;

    cfg.workers = 1;
    const std::string csv1 = to_csv(run_ensemble(cfg));
    cfg.workers = 4;
    const std::string csv4 = to_csv(run_ensemble(cfg));
    cfg.workers = 8;
    const std::string csv8 = to_csv(run_ensemble(cfg));
    check.expect(csv1 == csv4, "1-worker and 4-worker CSV bytes identical");
    check.expect(csv1 == csv8, "1-worker and 8-worker CSV bytes identical");
}

struct Criterion {
    int id;
    const char* name;
    std::function<void(Checker&)> run;
};

const std::vector<Criterion>& criteria() {
    static const std::vector<Criterion> all = {
        {1, "Ising one-point exactness", criterion_1},
        {2, "all-to-all revival vs Gaussian baseline", criterion_2},
        {3, "two-point cos^2 sampling error law", criterion_3},
        {4, "XY short-time accuracy vs ED", criterion_4},
        {5, "squeezing witness and range dependence", criterion_5},
        {6, "1/sqrt(n_t) statistical convergence", criterion_6},
        {7, "conservation property suite", criterion_7},
        {8, "scale demonstration", criterion_8},
        {9, "worker-count determinism", criterion_9},
    };
    return all;
}

}  // namespace

int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int a = 1; a < argc; ++a) selected.push_back(std::atoi(argv[a]));

    int total_failures = 0;
    for (const auto& criterion : criteria()) {
        if (!selected.empty() &&
            std::find(selected.begin(), selected.end(), criterion.id) == selected.end())
            continue;
        std::printf("criterion %d: %s\n", criterion.id, criterion.name);
        std::fflush(stdout);
        Checker check;
        const auto start = std::chrono::steady_clock::now();
        try {
            criterion.run(check);
        } catch (const std::exception& e) {
            check.failures += 1;
            std::printf("    [fail] exception: %s\n", e.what());
        }
        const double seconds =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        std::printf("[%s] criterion %d: %s (%.1f s)\n", check.failures == 0 ? "PASS" : "FAIL",
                    criterion.id, criterion.name, seconds);
        std::fflush(stdout);
        total_failures += check.failures;
    }
    return total_failures == 0 ? 0 : 1;
}
