// Command line front end: run ensembles, enumerate the sampling support,
// scan trajectory counts and filling fractions, and compare against the
// built-in exact references.

#include <chrono>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "dtwa/ensemble.hpp"
#include "dtwa/oracle.hpp"
#include "dtwa/output.hpp"
#include "dtwa/version.hpp"

namespace {

using namespace dtwa;

struct CommonOptions {
    std::string config_path;
    std::optional<std::string> out_csv;
    std::optional<std::string> out_json;
    std::optional<std::string> plot_dir;
    std::optional<std::string> sites_csv;
    std::optional<std::uint64_t> n_t;
    std::optional<std::uint64_t> seed;
    std::optional<int> workers;
    std::optional<double> t_max;
    std::optional<std::string> sampler;
    std::optional<std::string> trajectories_csv;
    bool force_integrator = false;
};

void add_common(CLI::App* cmd, CommonOptions& opt) {
    cmd->add_option("-c,--config", opt.config_path, "JSON run configuration")->required();
    cmd->add_option("--out-csv", opt.out_csv, "write the observable table here");
    cmd->add_option("--out-json", opt.out_json, "write the JSON summary here");
    cmd->add_option("--emit-plot-data", opt.plot_dir, "write per-figure data files here");
    cmd->add_option("--dump-sites", opt.sites_csv, "write the occupied sites as CSV");
    cmd->add_option("--dump-trajectories", opt.trajectories_csv,
                    "write per-trajectory collective observables as CSV");
    cmd->add_option("--n-t", opt.n_t, "override the trajectory count");
    cmd->add_option("--seed", opt.seed, "override the master seed");
    cmd->add_option("--workers", opt.workers, "override the worker count");
    cmd->add_option("--t-max", opt.t_max, "override the end of the time grid");
    cmd->add_option("--sampler", opt.sampler, "override the sampler (dtwa|gaussian)");
    cmd->add_flag("--force-integrator", opt.force_integrator,
                  "disable the pure-Ising closed-form fast path");
}

RunConfig load_with_overrides(const CommonOptions& opt) {
    RunConfig cfg = load_config(opt.config_path);
    if (opt.n_t) cfg.n_t = *opt.n_t;
    if (opt.seed) cfg.master_seed = *opt.seed;
    if (opt.workers) cfg.workers = *opt.workers;
    if (opt.t_max) {
        cfg.time.t_max = *opt.t_max;
        cfg.time.times.reset();
    }
    if (opt.sampler) cfg.sampler = parse_sampler_kind(*opt.sampler);
    if (opt.force_integrator) cfg.time.force_integrator = true;
    if (opt.trajectories_csv) cfg.dump_trajectories = true;
    cfg.validate();
    return cfg;
}

void write_file(const std::string& path, const std::string& contents) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    out << contents;
}

void emit_result(const CommonOptions& opt, const RunConfig& cfg, const RunResult& result) {
    for (const auto& warning : result.warnings)
        std::cerr << "warning: " << warning << "\n";
    if (opt.sites_csv) {
        const auto setup = build_realization(cfg, 0);
        std::ofstream out(*opt.sites_csv);
        write_sites_csv(out, setup.sites);
    }
    if (opt.out_csv) write_file(*opt.out_csv, to_csv(result));
    if (opt.trajectories_csv) {
        std::ofstream out(*opt.trajectories_csv);
        write_trajectory_dump(out, result);
    }
    if (opt.out_json) {
        std::ofstream out(*opt.out_json);
        write_json(out, result, cfg);
    }
    if (opt.plot_dir) {
        const auto files = emit_plot_data(*opt.plot_dir, result, cfg);
        for (const auto& f : files) std::cerr << "wrote " << f << "\n";
    }
    if (!opt.out_csv && !opt.out_json) write_csv(std::cout, result);
}

std::vector<double> parse_double_list(const std::string& text) {
    std::vector<double> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ','))
        if (!item.empty()) values.push_back(std::stod(item));
    return values;
}

std::vector<std::uint64_t> parse_count_list(const std::string& text) {
    std::vector<std::uint64_t> values;
    std::stringstream stream(text);
    std::string item;
    while (std::getline(stream, item, ','))
        if (!item.empty()) values.push_back(std::stoull(item));
    return values;
}

// one curve of the requested observable from the quantum reference
std::vector<double> ed_curve(const RealizationSetup& setup, const std::string& observable) {
    const auto states = oracle::ed_evolve(setup.params, setup.initial, setup.times);
    std::vector<double> curve;
    curve.reserve(states.size());
    const double n = static_cast<double>(setup.params.n_spins());
    for (const auto& state : states) {
        const auto obs = oracle::ed_observables(state);
        if (observable == "Sx")
            curve.push_back(obs.collective.x());
        else if (observable == "Sx_per_spin")
            curve.push_back(obs.collective.x() / n);
        else if (observable == "var_Sx")
            curve.push_back(obs.second_moments(0, 0) -
                            obs.collective.x() * obs.collective.x());
        else if (observable == "SySz")
            curve.push_back(obs.second_moments(1, 2));
        else if (observable == "xi")
            curve.push_back(obs.xi_defined ? obs.xi
                                           : std::numeric_limits<double>::quiet_NaN());
        else
            throw ConfigError("oracle-compare supports Sx, Sx_per_spin, var_Sx, SySz, xi");
    }
    return curve;
}

std::vector<double> analytic_ising_curve(const RealizationSetup& setup,
                                         const std::string& observable) {
    const auto& jz = setup.params.j_z;
    const int n = jz.n_spins();
    std::vector<double> curve;
    curve.reserve(setup.times.size());
    for (double t : setup.times) {
        if (observable == "Sx" || observable == "Sx_per_spin") {
            double sx = 0.0;
            for (int i = 0; i < n; ++i) sx += oracle::exact_ising_sx(jz, t, i);
            curve.push_back(observable == "Sx" ? sx : sx / n);
        } else if (observable == "var_Sx") {
            curve.push_back(oracle::exact_ising_var_sx(jz, t));
        } else if (observable == "SySz") {
            curve.push_back(oracle::exact_ising_re_sysz(jz, t));
        } else {
            throw ConfigError("the analytic Ising oracle provides Sx, Sx_per_spin, "
                              "var_Sx and SySz; use --oracle ed for xi");
        }
    }
    return curve;
}

int run_main(const CommonOptions& opt, bool enumerated) {
    const RunConfig cfg = load_with_overrides(opt);
    const auto start = std::chrono::steady_clock::now();
    const RunResult result = enumerated ? run_enumerated(cfg) : run_ensemble(cfg);
    const auto seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::cerr << (enumerated ? "enumerated " : "sampled ") << result.n_t
              << (enumerated ? " support configurations" : " trajectories") << " over "
              << result.times.size() << " output times in " << seconds << " s (config "
              << result.config_digest << ")\n";
    emit_result(opt, cfg, result);
    return 0;
}

int oracle_compare_main(const CommonOptions& opt, const std::string& observable,
                        const std::string& oracle_kind, bool enumerated) {
    const RunConfig cfg = load_with_overrides(opt);
    const RealizationSetup setup = build_realization(cfg, 0);
    const RunResult result = enumerated ? run_enumerated(cfg) : run_ensemble(cfg);

    std::string kind = oracle_kind;
    if (kind == "auto")
        kind = setup.params.pure_ising() && observable != "xi" ? "ising" : "ed";
    std::vector<double> reference;
    if (kind == "ising") {
        if (!setup.params.pure_ising())
            throw ConfigError("the analytic Ising oracle needs J_perp = 0 and Omega = 0");
        reference = analytic_ising_curve(setup, observable);
    } else if (kind == "ed") {
        reference = ed_curve(setup, observable);
    } else {
        throw ConfigError("--oracle must be auto, ising, or ed");
    }

    OracleComparison comparison;
    comparison.observable = observable;
    comparison.times = result.times;
    comparison.dtwa = result.at(observable).estimate;
    comparison.std_error = result.at(observable).std_error;
    comparison.oracle = reference;

    if (opt.out_csv) {
        std::ofstream out(*opt.out_csv);
        write_oracle_compare_csv(out, comparison);
    } else {
        write_oracle_compare_csv(std::cout, comparison);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"discrete phase-space trajectory simulator for interacting spin-1/2 lattices"};
    app.set_version_flag("--version", std::string(dtwa::kVersion));
    app.require_subcommand(1);

    CommonOptions run_opt, enum_opt, conv_opt, fill_opt, cmp_opt;

    auto* run_cmd = app.add_subcommand("run", "Monte Carlo trajectory ensemble");
    add_common(run_cmd, run_opt);

    auto* enum_cmd =
        app.add_subcommand("enumerate", "exact weighted sum over the sampling support");
    add_common(enum_cmd, enum_opt);

    auto* conv_cmd =
        app.add_subcommand("converge", "repeat a run over a list of trajectory counts");
    add_common(conv_cmd, conv_opt);
    std::string n_t_list = "500,1000,2000,4000,8000,16000,32000,64000";
    conv_cmd->add_option("--n-t-list", n_t_list, "comma separated trajectory counts");

    auto* fill_cmd =
        app.add_subcommand("sweep-filling", "scan filling fractions with disorder averaging");
    add_common(fill_cmd, fill_opt);
    std::string filling_list = "0.1,0.2,0.3,0.4,0.5,0.6,0.7,0.8,0.9,1.0";
    fill_cmd->add_option("--fillings", filling_list, "comma separated filling fractions");

    auto* cmp_cmd = app.add_subcommand("oracle-compare",
                                       "side-by-side table against an exact reference");
    add_common(cmp_cmd, cmp_opt);
    std::string observable = "Sx_per_spin";
    std::string oracle_kind = "auto";
    bool cmp_enumerated = false;
    cmp_cmd->add_option("--observable", observable, "Sx|Sx_per_spin|var_Sx|SySz|xi");
    cmp_cmd->add_option("--oracle", oracle_kind, "auto|ising|ed");
    cmp_cmd->add_flag("--enumerated", cmp_enumerated,
                      "compare the exact enumeration instead of a sampled run");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return run_main(run_opt, /*enumerated=*/false);
        if (enum_cmd->parsed()) return run_main(enum_opt, /*enumerated=*/true);
        if (conv_cmd->parsed()) {
            const RunConfig cfg = load_with_overrides(conv_opt);
            const auto sweep = convergence_sweep(cfg, parse_count_list(n_t_list));
            if (conv_opt.out_csv) {
                std::ofstream out(*conv_opt.out_csv);
                write_convergence_csv(out, sweep);
            } else {
                write_convergence_csv(std::cout, sweep);
            }
            std::cerr << "slope(Sx) = " << sweep.slope_sx
                      << ", slope(xi) = " << sweep.slope_xi << "\n";
            return 0;
        }
        if (fill_cmd->parsed()) {
            const RunConfig cfg = load_with_overrides(fill_opt);
            const auto points = sweep_filling(cfg, parse_double_list(filling_list));
            if (fill_opt.out_csv) {
                std::ofstream out(*fill_opt.out_csv);
                write_filling_csv(out, points);
            } else {
                write_filling_csv(std::cout, points);
            }
            return 0;
        }
        if (cmp_cmd->parsed())
            return oracle_compare_main(cmp_opt, observable, oracle_kind, cmp_enumerated);
    } catch (const dtwa::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
