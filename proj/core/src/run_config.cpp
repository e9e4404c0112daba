#include "dtwa/run_config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace dtwa {

using nlohmann::json;

ModelKind parse_model_kind(const std::string& name) {
    if (name == "ising") return ModelKind::ising;
    if (name == "xy") return ModelKind::xy;
    if (name == "xxz") return ModelKind::xxz;
    throw ConfigError("unknown model kind '" + name + "' (ising|xy|xxz)");
}

std::string to_string(ModelKind kind) {
    switch (kind) {
        case ModelKind::ising: return "ising";
        case ModelKind::xy: return "xy";
        default: return "xxz";
    }
}

SamplerKind parse_sampler_kind(const std::string& name) {
    if (name == "dtwa") return SamplerKind::dtwa;
    if (name == "gaussian") return SamplerKind::gaussian;
    throw ConfigError("unknown sampler '" + name + "' (dtwa|gaussian)");
}

std::string to_string(SamplerKind kind) {
    return kind == SamplerKind::dtwa ? "dtwa" : "gaussian";
}

std::vector<double> TimeSpec::grid() const {
    if (times) {
        if (times->empty()) throw ConfigError("explicit time grid is empty");
        for (std::size_t k = 0; k + 1 < times->size(); ++k)
            if ((*times)[k + 1] < (*times)[k])
                throw ConfigError("explicit time grid must be nondecreasing");
        if (times->front() < 0.0) throw ConfigError("times must be nonnegative");
        return *times;
    }
    if (n_out < 1) throw ConfigError("time.n_out must be at least 1");
    if (t_max < 0.0) throw ConfigError("time.t_max must be nonnegative");
    std::vector<double> grid(static_cast<std::size_t>(n_out));
    if (n_out == 1) {
        grid[0] = t_max;
    } else {
        for (int k = 0; k < n_out; ++k)
            grid[static_cast<std::size_t>(k)] =
                t_max * static_cast<double>(k) / static_cast<double>(n_out - 1);
    }
    return grid;
}

ProductState RunConfig::initial_state() const {
    const int n = n_sites();
    if (initial_axes.empty()) return ProductState(n, parse_axis("+x"));
    if (initial_axes.size() == 1) return ProductState(n, initial_axes.front());
    if (static_cast<int>(initial_axes.size()) != n)
        throw ConfigError("initial.axes must list one axis per site");
    return ProductState(initial_axes);
}

int RunConfig::profile_center() const {
    if (pairs.center >= 0) return pairs.center;
    return n_sites() / 2;
}

std::vector<PairRequest> RunConfig::pair_list() const {
    std::vector<PairRequest> list = pairs.explicit_pairs;
    if (pairs.center_to_all) {
        const int c = profile_center();
        for (int k = 0; k < n_sites(); ++k) list.push_back({c, k});
    }
    return list;
}

void RunConfig::validate() const {
    dtwa::validate(lattice);
    if (alpha < 0.0) throw ConfigError("alpha must be >= 0");
    if (n_t < 1) throw ConfigError("ensemble.n_t must be at least 1");
    if (disorder_realizations < 1)
        throw ConfigError("ensemble.disorder_realizations must be at least 1");
    if (batch_size < 1) throw ConfigError("ensemble.batch_size must be at least 1");
    if (workers < 0) throw ConfigError("ensemble.workers must be >= 0");
    if (time.dt && *time.dt <= 0.0) throw ConfigError("time.dt must be positive");
    initial_state();  // validates per-site axis count
    const auto list = pair_list();
    for (const auto& p : list) {
        if (p.i < 0 || p.i >= n_sites() || p.j < 0 || p.j >= n_sites())
            throw ConfigError("observables.pairs indices outside the site range");
    }
    static_cast<void>(time.grid());
}

namespace {

json axis_list_json(const std::vector<Polarization>& axes) {
    json arr = json::array();
    for (const auto& a : axes) arr.push_back(to_string(a));
    return arr;
}

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key) || obj.at(key).is_null()) return fallback;
    return obj.at(key).get<T>();
}

}  // namespace

RunConfig config_from_json(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::parse_error& e) {
        throw ConfigError(std::string("config is not valid JSON: ") + e.what());
    }
    RunConfig cfg;
    try {
        if (root.contains("lattice")) {
            const json& lat = root.at("lattice");
            if (lat.contains("extents")) {
                const auto ext = lat.at("extents").get<std::vector<int>>();
                if (ext.size() != 3)
                    throw ConfigError("lattice.extents must have three entries");
                cfg.lattice.extents = {ext[0], ext[1], ext[2]};
            }
            cfg.lattice.filling = get_or(lat, "filling", cfg.lattice.filling);
            if (lat.contains("quantization_axis")) {
                const auto ax = lat.at("quantization_axis").get<std::vector<double>>();
                if (ax.size() != 3)
                    throw ConfigError("lattice.quantization_axis must have three entries");
                cfg.lattice.quantization_axis = {ax[0], ax[1], ax[2]};
            }
            cfg.j = get_or(lat, "j", cfg.j);
            cfg.alpha = get_or(lat, "alpha", cfg.alpha);
            if (lat.contains("mode"))
                cfg.mode = parse_coupling_mode(lat.at("mode").get<std::string>());
        }
        if (root.contains("model")) {
            const json& model = root.at("model");
            if (model.contains("kind"))
                cfg.kind = parse_model_kind(model.at("kind").get<std::string>());
            cfg.omega = get_or(model, "omega", cfg.omega);
            cfg.j_perp_factor = get_or(model, "j_perp_factor", cfg.j_perp_factor);
            cfg.j_z_factor = get_or(model, "j_z_factor", cfg.j_z_factor);
        }
        if (root.contains("initial")) {
            const json& init = root.at("initial");
            if (init.contains("axes")) {
                for (const auto& a : init.at("axes"))
                    cfg.initial_axes.push_back(parse_axis(a.get<std::string>()));
            } else if (init.contains("axis")) {
                cfg.initial_axes.push_back(parse_axis(init.at("axis").get<std::string>()));
            }
        }
        if (root.contains("sampler"))
            cfg.sampler = parse_sampler_kind(root.at("sampler").get<std::string>());
        if (root.contains("time")) {
            const json& t = root.at("time");
            cfg.time.t_max = get_or(t, "t_max", cfg.time.t_max);
            cfg.time.n_out = get_or(t, "n_out", cfg.time.n_out);
            if (t.contains("dt") && !t.at("dt").is_null())
                cfg.time.dt = t.at("dt").get<double>();
            if (t.contains("times") && !t.at("times").is_null())
                cfg.time.times = t.at("times").get<std::vector<double>>();
            cfg.time.force_integrator =
                get_or(t, "force_integrator", cfg.time.force_integrator);
        }
        if (root.contains("ensemble")) {
            const json& e = root.at("ensemble");
            cfg.n_t = get_or<std::uint64_t>(e, "n_t", cfg.n_t);
            cfg.master_seed = get_or<std::uint64_t>(e, "master_seed", cfg.master_seed);
            cfg.disorder_realizations =
                get_or(e, "disorder_realizations", cfg.disorder_realizations);
            cfg.workers = get_or(e, "workers", cfg.workers);
            cfg.batch_size = get_or(e, "batch_size", cfg.batch_size);
            cfg.enumeration_cap =
                get_or<std::uint64_t>(e, "enumeration_cap", cfg.enumeration_cap);
            cfg.memory_cap_mib = get_or(e, "memory_cap_mib", cfg.memory_cap_mib);
        }
        if (root.contains("observables")) {
            const json& o = root.at("observables");
            cfg.squeezing = get_or(o, "squeezing", cfg.squeezing);
            cfg.squeezing_errors = get_or(o, "squeezing_errors", cfg.squeezing_errors);
            cfg.site_means = get_or(o, "site_means", cfg.site_means);
            cfg.dump_trajectories = get_or(o, "dump_trajectories", cfg.dump_trajectories);
            if (o.contains("pairs")) {
                const json& p = o.at("pairs");
                if (p.is_string()) {
                    const auto text = p.get<std::string>();
                    if (text == "center_to_all")
                        cfg.pairs.center_to_all = true;
                    else if (text != "none")
                        throw ConfigError("observables.pairs string must be "
                                          "'none' or 'center_to_all'");
                } else if (p.is_array()) {
                    for (const auto& entry : p) {
                        const auto idx = entry.get<std::vector<int>>();
                        if (idx.size() != 2)
                            throw ConfigError("each pair must be [i, j]");
                        cfg.pairs.explicit_pairs.push_back({idx[0], idx[1]});
                    }
                }
            }
            cfg.pairs.center = get_or(o, "center", cfg.pairs.center);
        }
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config field has the wrong type: ") + e.what());
    }
    cfg.validate();
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return config_from_json(buffer.str());
}

std::string config_to_json(const RunConfig& cfg) {
    json root;
    root["lattice"] = {
        {"extents", {cfg.lattice.extents[0], cfg.lattice.extents[1], cfg.lattice.extents[2]}},
        {"filling", cfg.lattice.filling},
        {"quantization_axis",
         {cfg.lattice.quantization_axis.x(), cfg.lattice.quantization_axis.y(),
          cfg.lattice.quantization_axis.z()}},
        {"j", cfg.j},
        {"alpha", cfg.alpha},
        {"mode", to_string(cfg.mode)},
    };
    root["model"] = {
        {"kind", to_string(cfg.kind)},
        {"omega", cfg.omega},
        {"j_perp_factor", cfg.j_perp_factor},
        {"j_z_factor", cfg.j_z_factor},
    };
    json initial;
    if (cfg.initial_axes.size() <= 1) {
        initial["axis"] =
            cfg.initial_axes.empty() ? "+x" : to_string(cfg.initial_axes.front());
    } else {
        initial["axes"] = axis_list_json(cfg.initial_axes);
    }
    root["initial"] = initial;
    root["sampler"] = to_string(cfg.sampler);
    json time = {
        {"t_max", cfg.time.t_max},
        {"n_out", cfg.time.n_out},
        {"force_integrator", cfg.time.force_integrator},
    };
    if (cfg.time.dt) time["dt"] = *cfg.time.dt;
    if (cfg.time.times) time["times"] = *cfg.time.times;
    root["time"] = time;
    root["ensemble"] = {
        {"n_t", cfg.n_t},
        {"master_seed", cfg.master_seed},
        {"disorder_realizations", cfg.disorder_realizations},
        {"workers", cfg.workers},
        {"batch_size", cfg.batch_size},
        {"enumeration_cap", cfg.enumeration_cap},
        {"memory_cap_mib", cfg.memory_cap_mib},
    };
    json pairs;
    if (cfg.pairs.center_to_all) {
        pairs = "center_to_all";
    } else if (cfg.pairs.explicit_pairs.empty()) {
        pairs = "none";
    } else {
        pairs = json::array();
        for (const auto& p : cfg.pairs.explicit_pairs) pairs.push_back({p.i, p.j});
    }
    root["observables"] = {
        {"squeezing", cfg.squeezing},
        {"squeezing_errors", cfg.squeezing_errors},
        {"site_means", cfg.site_means},
        {"dump_trajectories", cfg.dump_trajectories},
        {"pairs", pairs},
        {"center", cfg.pairs.center},
    };
    return root.dump(2);
}

std::string config_digest(const RunConfig& cfg) {
    // FNV-1a 64 over the canonical serialized form (nlohmann orders keys)
    const std::string text = config_to_json(cfg);
    std::uint64_t h = 0xCBF29CE484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001B3ULL;
    }
    std::ostringstream out;
    out << std::hex << h;
    return out.str();
}

}  // namespace dtwa
