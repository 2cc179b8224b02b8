#include "qdob/sim.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <numbers>
#include <string>

#include "float_text.hpp"
#include "qdob/multistage.hpp"  // round_half_away

namespace qdob {

using detail::append_shortest;
using detail::parse_double;

SimTrace run_closed_loop(PlantDoubleIntegrator& plant, Compensator* compensator,
                         DisturbanceGenerator& disturbance,
                         const SimOptions& options) {
    const double T = plant.sample_time();
    if (!(options.duration > 0.0))
        throw config_error("run_closed_loop: duration must be positive");

    const long steps = round_half_away(options.duration / T) + 1;

    SimTrace trace;
    trace.sample_time = T;
    trace.t.reserve(static_cast<std::size_t>(steps));
    trace.r.reserve(static_cast<std::size_t>(steps));
    trace.u.reserve(static_cast<std::size_t>(steps));
    trace.d.reserve(static_cast<std::size_t>(steps));
    trace.dhat.reserve(static_cast<std::size_t>(steps));
    trace.y.reserve(static_cast<std::size_t>(steps));
    trace.e.reserve(static_cast<std::size_t>(steps));

    const auto& profile = disturbance.profile();
    double fundamental = 0.0;
    switch (profile.kind) {
        case DisturbanceKind::sinusoid:
            fundamental = 2.0 * std::numbers::pi / profile.frequency;
            break;
        case DisturbanceKind::fourier_periodic:
        case DisturbanceKind::quasiperiodic_drift:
            fundamental = profile.period;
            break;
        default:
            break;
    }
    if (fundamental > 0.0 && options.duration < 10.0 * fundamental) {
        std::string w = "duration ";
        append_shortest(w, options.duration);
        w += " s covers fewer than ten disturbance cycles (";
        append_shortest(w, fundamental);
        w += " s each); spectral summaries will be noisy";
        trace.warnings.push_back(std::move(w));
    }

    OuterPdController pd(options.use_outer_pd
                             ? options.pd_gains
                             : OuterPdGains{0.0, 0.0, options.pd_gains.filter_g},
                         plant.inertia(), T);

    for (long k = 0; k < steps; ++k) {
        const double t = static_cast<double>(k) * T;
        const double y = plant.position();
        if (!std::isfinite(y)) throw numeric_fault("plant position", k);

        const double cmd = options.command ? options.command(t) : 0.0;
        double r;
        if (options.use_outer_pd)
            r = pd.step(cmd, y);
        else
            r = options.reference ? options.reference(t) : 0.0;

        CompensatorOutput out{r, 0.0};
        if (compensator) out = compensator->step(r, y);

        const double d = disturbance.at_step(k);

        trace.t.push_back(t);
        trace.r.push_back(r);
        trace.u.push_back(out.u);
        trace.d.push_back(d);
        trace.dhat.push_back(out.dhat);
        trace.y.push_back(y);
        trace.e.push_back(cmd - y);

        plant.advance(out.u, d);
    }
    return trace;
}

void save_trace_csv(const SimTrace& trace, const std::string& path) {
    std::string body;
    body.reserve(trace.size() * 64 + 32);
    body += "t,r,u,d,dhat,y,e\n";
    for (std::size_t k = 0; k < trace.size(); ++k) {
        append_shortest(body, trace.t[k]);
        body += ',';
        append_shortest(body, trace.r[k]);
        body += ',';
        append_shortest(body, trace.u[k]);
        body += ',';
        append_shortest(body, trace.d[k]);
        body += ',';
        append_shortest(body, trace.dhat[k]);
        body += ',';
        append_shortest(body, trace.y[k]);
        body += ',';
        append_shortest(body, trace.e[k]);
        body += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open " + path + " for writing");
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw io_error("write failed for " + path);
}

SimTrace load_trace_csv(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open " + path);

    std::string line;
    if (!std::getline(f, line)) throw io_error("empty trace file " + path);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != "t,r,u,d,dhat,y,e")
        throw io_error("unexpected trace header in " + path + ": " + line);

    SimTrace trace;
    while (std::getline(f, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::array<double, 7> row{};
        std::size_t begin = 0;
        for (int col = 0; col < 7; ++col) {
            std::size_t end = (col == 6) ? line.size() : line.find(',', begin);
            if (end == std::string::npos)
                throw io_error("short row in " + path + ": " + line);
            row[static_cast<std::size_t>(col)] =
                parse_double(std::string_view(line).substr(begin, end - begin), path);
            begin = end + 1;
        }
        trace.t.push_back(row[0]);
        trace.r.push_back(row[1]);
        trace.u.push_back(row[2]);
        trace.d.push_back(row[3]);
        trace.dhat.push_back(row[4]);
        trace.y.push_back(row[5]);
        trace.e.push_back(row[6]);
    }
    if (trace.size() >= 2) trace.sample_time = trace.t[1] - trace.t[0];
    return trace;
}

}  // namespace qdob
