#include "qdob/config_io.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

namespace qdob {

using json = nlohmann::ordered_json;

std::string to_string(ControllerChoice c) {
    switch (c) {
        case ControllerChoice::none: return "none";
        case ControllerChoice::qdob: return "qdob";
        case ControllerChoice::dob1: return "dob1";
        case ControllerChoice::dob4: return "dob4";
    }
    throw config_error("unknown controller choice");
}

ControllerChoice controller_choice_from(const std::string& name) {
    if (name == "none") return ControllerChoice::none;
    if (name == "qdob") return ControllerChoice::qdob;
    if (name == "dob1") return ControllerChoice::dob1;
    if (name == "dob4") return ControllerChoice::dob4;
    throw config_error("unknown controller choice '" + name +
                       "' (expected none, qdob, dob1, or dob4)");
}

namespace {

std::string to_string(DisturbanceKind k) {
    switch (k) {
        case DisturbanceKind::constant: return "constant";
        case DisturbanceKind::sinusoid: return "sinusoid";
        case DisturbanceKind::fourier_periodic: return "fourier_periodic";
        case DisturbanceKind::quasiperiodic_drift: return "quasiperiodic_drift";
    }
    throw config_error("unknown disturbance kind");
}

DisturbanceKind disturbance_kind_from(const std::string& name) {
    if (name == "constant") return DisturbanceKind::constant;
    if (name == "sinusoid") return DisturbanceKind::sinusoid;
    if (name == "fourier_periodic") return DisturbanceKind::fourier_periodic;
    if (name == "quasiperiodic_drift") return DisturbanceKind::quasiperiodic_drift;
    throw config_error("unknown disturbance kind '" + name +
                       "' (expected constant, sinusoid, fourier_periodic, "
                       "or quasiperiodic_drift)");
}

// Collects every unknown key with its object path so one error message
// covers the whole file.
void collect_unknown_keys(const json& node, const std::string& path,
                          std::initializer_list<const char*> known,
                          std::vector<std::string>& unknown) {
    if (!node.is_object())
        throw config_error("config section '" + path + "' must be a JSON object");
    for (const auto& item : node.items()) {
        bool found = false;
        for (const char* k : known)
            if (item.key() == k) {
                found = true;
                break;
            }
        if (!found) unknown.push_back(path + "." + item.key());
    }
}

template <typename T>
void read_field(const json& node, const char* key, T& into,
                const std::string& path) {
    if (!node.contains(key)) return;
    try {
        node.at(key).get_to(into);
    } catch (const json::exception& e) {
        throw config_error("bad value for " + path + "." + key + ": " + e.what());
    }
}

void read_field(const json& node, const char* key, ControllerChoice& into,
                const std::string& path) {
    if (!node.contains(key)) return;
    std::string name;
    read_field(node, key, name, path);
    into = controller_choice_from(name);
}

void read_field(const json& node, const char* key, DisturbanceKind& into,
                const std::string& path) {
    if (!node.contains(key)) return;
    std::string name;
    read_field(node, key, name, path);
    into = disturbance_kind_from(name);
}

}  // namespace

std::vector<double> default_sweep_grid() {
    std::vector<double> grid;
    grid.reserve(81);
    for (int i = 0; i <= 80; ++i) grid.push_back(std::pow(10.0, 0.025 * i));
    return grid;
}

ExperimentConfig parse_experiment_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw config_error(std::string("config is not valid JSON: ") + e.what());
    }

    std::vector<std::string> unknown;
    collect_unknown_keys(root, "$",
                         {"controller", "choice", "classic_cutoff", "disturbance",
                          "outer_pd", "run", "sweep", "analysis"},
                         unknown);

    ExperimentConfig cfg;

    if (root.contains("controller")) {
        const json& c = root.at("controller");
        collect_unknown_keys(c, "$.controller",
                             {"mu", "stage_count", "max_order", "omega_a", "omega_b",
                              "rho", "period", "inertia", "sample_time"},
                             unknown);
        read_field(c, "mu", cfg.controller.mu, "$.controller");
        read_field(c, "stage_count", cfg.controller.stage_count, "$.controller");
        read_field(c, "max_order", cfg.controller.max_order, "$.controller");
        read_field(c, "omega_a", cfg.controller.omega_a, "$.controller");
        read_field(c, "omega_b", cfg.controller.omega_b, "$.controller");
        read_field(c, "rho", cfg.controller.rho, "$.controller");
        read_field(c, "period", cfg.controller.period, "$.controller");
        read_field(c, "inertia", cfg.controller.inertia, "$.controller");
        read_field(c, "sample_time", cfg.controller.sample_time, "$.controller");
    }
    read_field(root, "choice", cfg.choice, "$");
    read_field(root, "classic_cutoff", cfg.classic_cutoff, "$");

    if (root.contains("disturbance")) {
        const json& d = root.at("disturbance");
        collect_unknown_keys(d, "$.disturbance",
                             {"kind", "period", "cosine", "sine", "drift_depth",
                              "drift_cutoff", "amplitude", "frequency", "level"},
                             unknown);
        read_field(d, "kind", cfg.disturbance.kind, "$.disturbance");
        read_field(d, "period", cfg.disturbance.period, "$.disturbance");
        read_field(d, "cosine", cfg.disturbance.cosine, "$.disturbance");
        read_field(d, "sine", cfg.disturbance.sine, "$.disturbance");
        read_field(d, "drift_depth", cfg.disturbance.drift_depth, "$.disturbance");
        read_field(d, "drift_cutoff", cfg.disturbance.drift_cutoff, "$.disturbance");
        read_field(d, "amplitude", cfg.disturbance.amplitude, "$.disturbance");
        read_field(d, "frequency", cfg.disturbance.frequency, "$.disturbance");
        read_field(d, "level", cfg.disturbance.level, "$.disturbance");
    }

    if (root.contains("outer_pd")) {
        const json& p = root.at("outer_pd");
        collect_unknown_keys(p, "$.outer_pd", {"enabled", "omega_n", "filter_g"},
                             unknown);
        read_field(p, "enabled", cfg.outer_pd.enabled, "$.outer_pd");
        read_field(p, "omega_n", cfg.outer_pd.omega_n, "$.outer_pd");
        read_field(p, "filter_g", cfg.outer_pd.filter_g, "$.outer_pd");
    }

    if (root.contains("run")) {
        const json& r = root.at("run");
        collect_unknown_keys(r, "$.run", {"duration", "seed"}, unknown);
        read_field(r, "duration", cfg.duration, "$.run");
        read_field(r, "seed", cfg.seed, "$.run");
    }

    if (root.contains("sweep")) {
        const json& s = root.at("sweep");
        collect_unknown_keys(
            s, "$.sweep", {"omegas", "duration", "transient_cut", "amplitude"},
            unknown);
        read_field(s, "omegas", cfg.sweep_omegas, "$.sweep");
        read_field(s, "duration", cfg.sweep_duration, "$.sweep");
        read_field(s, "transient_cut", cfg.sweep_transient, "$.sweep");
        read_field(s, "amplitude", cfg.sweep_amplitude, "$.sweep");
    }

    if (root.contains("analysis")) {
        const json& a = root.at("analysis");
        collect_unknown_keys(a, "$.analysis",
                             {"grid_points_per_decade", "uncertainty_bound"}, unknown);
        read_field(a, "grid_points_per_decade", cfg.grid_points_per_decade,
                   "$.analysis");
        read_field(a, "uncertainty_bound", cfg.uncertainty_bound, "$.analysis");
    }

    if (!unknown.empty()) {
        std::string msg = "unknown config keys:";
        for (const auto& k : unknown) msg += "\n  - " + k;
        throw config_error(msg);
    }
    return cfg;
}

ExperimentConfig load_experiment_config(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open config file " + path);
    std::ostringstream buf;
    buf << f.rdbuf();
    if (!f && !f.eof()) throw io_error("read failed for " + path);
    return parse_experiment_config(buf.str());
}

std::string emit_experiment_config(const ExperimentConfig& cfg) {
    json root;
    root["controller"] = {{"mu", cfg.controller.mu},
                          {"stage_count", cfg.controller.stage_count},
                          {"max_order", cfg.controller.max_order},
                          {"omega_a", cfg.controller.omega_a},
                          {"omega_b", cfg.controller.omega_b},
                          {"rho", cfg.controller.rho},
                          {"period", cfg.controller.period},
                          {"inertia", cfg.controller.inertia},
                          {"sample_time", cfg.controller.sample_time}};
    root["choice"] = to_string(cfg.choice);
    root["classic_cutoff"] = cfg.classic_cutoff;
    root["disturbance"] = {{"kind", to_string(cfg.disturbance.kind)},
                           {"period", cfg.disturbance.period},
                           {"cosine", cfg.disturbance.cosine},
                           {"sine", cfg.disturbance.sine},
                           {"drift_depth", cfg.disturbance.drift_depth},
                           {"drift_cutoff", cfg.disturbance.drift_cutoff},
                           {"amplitude", cfg.disturbance.amplitude},
                           {"frequency", cfg.disturbance.frequency},
                           {"level", cfg.disturbance.level}};
    root["outer_pd"] = {{"enabled", cfg.outer_pd.enabled},
                        {"omega_n", cfg.outer_pd.omega_n},
                        {"filter_g", cfg.outer_pd.filter_g}};
    root["run"] = {{"duration", cfg.duration}, {"seed", cfg.seed}};
    root["sweep"] = {{"omegas", cfg.sweep_omegas},
                     {"duration", cfg.sweep_duration},
                     {"transient_cut", cfg.sweep_transient},
                     {"amplitude", cfg.sweep_amplitude}};
    root["analysis"] = {{"grid_points_per_decade", cfg.grid_points_per_decade},
                        {"uncertainty_bound", cfg.uncertainty_bound}};
    return root.dump(2) + "\n";
}

}  // namespace qdob
