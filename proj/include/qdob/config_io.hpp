#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdob/controller.hpp"
#include "qdob/disturbance.hpp"

namespace qdob {

// Which torque-level compensator a run uses.
enum class ControllerChoice {
    none,  // u = r
    qdob,  // the comb-based observer this library is about
    dob1,  // first-order low-pass disturbance observer
    dob4,  // fourth-order low-pass disturbance observer
};

std::string to_string(ControllerChoice c);
ControllerChoice controller_choice_from(const std::string& name);

struct PdSettings {
    bool enabled = false;
    double omega_n = 2.0;    // closed position-loop natural frequency [rad/s]
    double filter_g = 40.0;  // pseudo-differentiator bandwidth [rad/s]

    bool operator==(const PdSettings&) const = default;
};

// Everything one CLI run needs, loadable from a JSON file. The file mirrors
// this struct as nested objects: controller, disturbance, outer_pd, run,
// sweep, analysis. Field names match member names one to one.
struct ExperimentConfig {
    QdobConfig controller;
    ControllerChoice choice = ControllerChoice::qdob;
    double classic_cutoff = 50.0;  // g for dob1/dob4 [rad/s]

    DisturbanceProfile disturbance;
    PdSettings outer_pd;

    // run
    double duration = 20.0;  // [s]
    std::uint64_t seed = 1;

    // sweep
    std::vector<double> sweep_omegas;  // empty -> 10^(0.025 i), i = 0..80
    double sweep_duration = 60.0;      // [s] per frequency
    double sweep_transient = 20.0;     // [s] discarded
    double sweep_amplitude = 1.0;

    // analysis
    int grid_points_per_decade = 400;
    double uncertainty_bound = 0.5;    // constant multiplicative bound

    bool operator==(const ExperimentConfig&) const = default;
};

// The default probe grid when sweep_omegas is empty: 81 log-spaced points
// 10^(0.025 i) for i = 0..80, i.e. 1 to 100 rad/s at 40 points/decade.
std::vector<double> default_sweep_grid();

// Strict JSON parsing: every key must be known, and all unknown keys are
// listed together in the config_error (with their object path), so a
// typo-ridden file is fixable in one pass. Values are range-checked with
// the same validate() calls the library applies everywhere else.
ExperimentConfig parse_experiment_config(const std::string& json_text);
ExperimentConfig load_experiment_config(const std::string& path);

// Canonical serialization: stable key order, round-trip-exact number
// formatting. parse(emit(c)) == c, and emitting twice is byte-identical.
std::string emit_experiment_config(const ExperimentConfig& config);

}  // namespace qdob
