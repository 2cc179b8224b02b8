#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "qdob/compensator.hpp"
#include "qdob/disturbance.hpp"
#include "qdob/outer_pd.hpp"
#include "qdob/plant.hpp"

namespace qdob {

// Uniformly sampled closed-loop record. Column k of each vector is sample k
// at t = k*T; all vectors share the same length.
struct SimTrace {
    double sample_time = 0.0;
    std::vector<double> t;     // time [s]
    std::vector<double> r;     // torque reference into the compensator
    std::vector<double> u;     // plant input produced by the compensator
    std::vector<double> d;     // injected disturbance
    std::vector<double> dhat;  // compensator's disturbance estimate
    std::vector<double> y;     // plant position
    std::vector<double> e;     // position command minus y
    std::vector<std::string> warnings;

    std::size_t size() const { return t.size(); }
};

// CSV round-trip with shortest-exact float formatting, so
// load(save(trace)) reproduces every sample bit for bit.
void save_trace_csv(const SimTrace& trace, const std::string& path);
SimTrace load_trace_csv(const std::string& path);

struct SimOptions {
    double duration = 1.0;                    // [s]
    std::function<double(double)> command;    // position command theta_cmd(t); default 0
    std::function<double(double)> reference;  // torque reference r(t) when no outer loop
    bool use_outer_pd = false;
    OuterPdGains pd_gains{};
};

// Runs the sampled loop for round(duration/T)+1 samples. Each step:
// read position, form the torque reference (outer PD or the supplied
// open-loop reference), let the compensator produce u, advance the plant
// with u and d(t). A null compensator means u = r (no inner compensation).
// Non-finite plant or compensator output raises numeric_fault carrying the
// step index. A duration shorter than ten disturbance periods appends a
// warning, since spectral estimates over so few cycles are unreliable.
SimTrace run_closed_loop(PlantDoubleIntegrator& plant,
                         Compensator* compensator,
                         DisturbanceGenerator& disturbance,
                         const SimOptions& options);

}  // namespace qdob
