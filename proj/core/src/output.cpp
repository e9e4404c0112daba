#include "dtwa/output.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

#include "dtwa/version.hpp"

namespace dtwa {

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    char buffer[40];
    std::snprintf(buffer, sizeof(buffer), "%.17g", v);
    return buffer;
}

void write_csv(std::ostream& out, const RunResult& result) {
    out << "time,observable,estimate,std_error,n_t\n";
    for (std::size_t t = 0; t < result.times.size(); ++t) {
        for (const auto& series : result.series) {
            out << format_double(result.times[t]) << ',' << series.name << ','
                << format_double(series.estimate[t]) << ','
                << format_double(series.std_error[t]) << ',' << result.n_t << '\n';
        }
    }
}

std::string to_csv(const RunResult& result) {
    std::ostringstream out;
    write_csv(out, result);
    return out.str();
}

void write_json(std::ostream& out, const RunResult& result, const RunConfig& config) {
    nlohmann::json root;
    root["version"] = kVersion;
    root["master_seed"] = result.master_seed;
    root["config_digest"] = result.config_digest;
    root["n_t"] = result.n_t;
    root["exact"] = result.exact;
    root["errors_defined"] = result.errors_defined;
    root["disorder_realizations"] = result.disorder_realizations;
    root["warnings"] = result.warnings;
    root["config"] = nlohmann::json::parse(config_to_json(config));
    root["times"] = result.times;
    nlohmann::json series = nlohmann::json::object();
    for (const auto& s : result.series) {
        nlohmann::json entry;
        entry["estimate"] = s.estimate;
        entry["std_error"] = s.std_error;
        series[s.name] = entry;
    }
    root["series"] = series;
    if (!result.xi_direction.empty()) {
        nlohmann::json dirs = nlohmann::json::array();
        for (const auto& d : result.xi_direction) dirs.push_back({d.x(), d.y(), d.z()});
        root["xi_direction"] = dirs;
    }
    out << root.dump(2) << '\n';
}

void write_oracle_compare_csv(std::ostream& out, const OracleComparison& comparison) {
    out << "time,dtwa_" << comparison.observable << ",oracle_" << comparison.observable
        << ",abs_diff,std_error\n";
    for (std::size_t t = 0; t < comparison.times.size(); ++t) {
        out << format_double(comparison.times[t]) << ','
            << format_double(comparison.dtwa[t]) << ',' << format_double(comparison.oracle[t])
            << ',' << format_double(std::abs(comparison.dtwa[t] - comparison.oracle[t])) << ','
            << format_double(comparison.std_error[t]) << '\n';
    }
}

void write_convergence_csv(std::ostream& out, const ConvergenceResult& result) {
    out << "n_t,max_rel_dev_Sx,max_rel_dev_xi,reference_n_t\n";
    for (const auto& p : result.points) {
        out << p.n_t << ',' << format_double(p.dev_sx) << ',' << format_double(p.dev_xi)
            << ',' << result.reference_n_t << '\n';
    }
    out << "# slope_Sx = " << format_double(result.slope_sx)
        << ", slope_xi = " << format_double(result.slope_xi) << '\n';
}

void write_filling_csv(std::ostream& out, const std::vector<FillingPoint>& points) {
    out << "filling,min_xi_mean,min_xi_spread,realizations\n";
    for (const auto& p : points) {
        out << format_double(p.filling) << ',' << format_double(p.min_xi_mean) << ','
            << format_double(p.min_xi_spread) << ',' << p.realizations << '\n';
    }
}

void write_trajectory_dump(std::ostream& out, const RunResult& result) {
    if (result.trajectory_samples.empty())
        throw ConfigError("no per-trajectory samples retained; enable "
                          "observables.dump_trajectories");
    out << "time,trajectory,Sx,Sy,Sz,SxSx,SxSy,SxSz,SySy,SySz,SzSz\n";
    for (std::size_t t = 0; t < result.times.size(); ++t) {
        const auto& samples = result.trajectory_samples[t];
        for (std::size_t k = 0; k < samples.size(); ++k) {
            out << format_double(result.times[t]) << ',' << k;
            for (double v : samples[k]) out << ',' << format_double(v);
            out << '\n';
        }
    }
}

std::vector<std::string> emit_plot_data(const std::string& directory, const RunResult& result,
                                        const RunConfig& config) {
    namespace fs = std::filesystem;
    fs::create_directories(directory);
    std::vector<std::string> written;

    auto open = [&](const std::string& name) {
        const std::string path = (fs::path(directory) / name).string();
        written.push_back(path);
        return std::ofstream(path);
    };

    {
        auto out = open("magnetization.csv");
        out << "time,Sx_per_spin,Sy_per_spin,Sz_per_spin\n";
        const auto& sx = result.at("Sx_per_spin").estimate;
        const auto& sy = result.at("Sy_per_spin").estimate;
        const auto& sz = result.at("Sz_per_spin").estimate;
        for (std::size_t t = 0; t < result.times.size(); ++t)
            out << format_double(result.times[t]) << ',' << format_double(sx[t]) << ','
                << format_double(sy[t]) << ',' << format_double(sz[t]) << '\n';
    }
    {
        auto out = open("collective_correlations.csv");
        out << "time,var_Sx,SySz\n";
        const auto& var_sx = result.at("var_Sx").estimate;
        const auto& sysz = result.at("SySz").estimate;
        for (std::size_t t = 0; t < result.times.size(); ++t)
            out << format_double(result.times[t]) << ',' << format_double(var_sx[t]) << ','
                << format_double(sysz[t]) << '\n';
    }
    if (const auto* xi = result.find("xi")) {
        auto out = open("squeezing.csv");
        out << "time,xi,xi_std_error\n";
        for (std::size_t t = 0; t < result.times.size(); ++t)
            out << format_double(result.times[t]) << ',' << format_double(xi->estimate[t])
                << ',' << format_double(xi->std_error[t]) << '\n';
    }
    if (config.pairs.center_to_all) {
        const CorrelationProfile profile =
            correlation_profile(result, config.profile_center(), Axis::y, Axis::y);
        auto out = open("correlation_profile_yy.csv");
        out << "time";
        for (int offset : profile.offsets) out << ",j=" << offset;
        out << '\n';
        for (std::size_t t = 0; t < result.times.size(); ++t) {
            out << format_double(result.times[t]);
            for (std::size_t k = 0; k < profile.offsets.size(); ++k)
                out << ',' << format_double(profile.values[t][k]);
            out << '\n';
        }
    }
    return written;
}

}  // namespace dtwa
