#include "qdob/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <memory>
#include <numbers>
#include <ostream>

#include <nlohmann/json.hpp>

#include "float_text.hpp"
#include "qdob/baselines.hpp"
#include "qdob/sim.hpp"

namespace qdob {

namespace {

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

void prepare_out_dir(const std::string& out_dir) {
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw io_error("cannot create output directory " + out_dir + ": " +
                           ec.message());
}

std::string join(const std::string& out_dir, const std::string& name) {
    return (fs::path(out_dir) / name).string();
}

std::shared_ptr<Compensator> make_compensator(const ExperimentConfig& cfg) {
    switch (cfg.choice) {
        case ControllerChoice::none:
            return nullptr;
        case ControllerChoice::qdob:
            return std::make_shared<QdobController>(cfg.controller);
        case ControllerChoice::dob1:
            return std::make_shared<ClassicDob>(1, cfg.classic_cutoff,
                                                cfg.controller.inertia,
                                                cfg.controller.sample_time);
        case ControllerChoice::dob4:
            return std::make_shared<ClassicDob>(4, cfg.classic_cutoff,
                                                cfg.controller.inertia,
                                                cfg.controller.sample_time);
    }
    throw config_error("unknown controller choice");
}

void write_text(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open " + path + " for writing");
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw io_error("write failed for " + path);
}

double mag_db(double m) { return 20.0 * std::log10(m); }

}  // namespace

std::vector<std::string> cmd_bode(const ExperimentConfig& config,
                                  const std::string& out_dir, std::ostream& log,
                                  bool quiet) {
    prepare_out_dir(out_dir);
    QdobAnalysis analysis(config.controller);
    const std::vector<double> grid =
        default_analysis_grid(config.controller, config.grid_points_per_decade);

    std::vector<std::string> written;
    const struct {
        const char* name;
        FrequencyResponse fr;
    } plots[] = {
        {"bode_delay_path.csv", analysis.delay_path(grid)},
        {"bode_comb_filter.csv", analysis.comb_filter(grid)},
        {"bode_open_loop.csv", analysis.open_loop(grid)},
        {"bode_sensitivity.csv", analysis.sensitivity(grid)},
        {"bode_complementary.csv", analysis.complementary(grid)},
    };
    for (const auto& p : plots) {
        const std::string path = join(out_dir, p.name);
        save_response_csv(p.fr, path);
        written.push_back(path);
    }
    if (!quiet)
        log << "bode: " << grid.size() << " grid points, " << written.size()
            << " responses written to " << out_dir << "\n";
    return written;
}

std::vector<std::string> cmd_sweep(const ExperimentConfig& config,
                                   const std::string& out_dir, std::ostream& log,
                                   bool quiet) {
    prepare_out_dir(out_dir);
    const double T = config.controller.sample_time;
    const double inertia = config.controller.inertia;
    const std::vector<double> omegas =
        config.sweep_omegas.empty() ? default_sweep_grid() : config.sweep_omegas;

    SweepOptions opts;
    opts.amplitude = config.sweep_amplitude;
    opts.duration = config.sweep_duration;
    opts.transient_cut = config.sweep_transient;

    // Disturbance-to-position map of the configured closed loop; each probe
    // frequency gets a fresh loop so transients never leak across points.
    auto factory = [&config, T, inertia]() -> SampleMap {
        auto plant = std::make_shared<PlantDoubleIntegrator>(inertia, T);
        std::shared_ptr<Compensator> comp = make_compensator(config);
        return [plant, comp](double d) {
            const double y = plant->position();
            const double u = comp ? comp->step(0.0, y).u : 0.0;
            plant->advance(u, d);
            return y;
        };
    };
    const FrequencyResponse measured = measure_gain_sweep(factory, omegas, T, opts);

    // Analytic counterpart: |Pn * S| for the comb loop, |Pn * (1 - Q)| for
    // the classic observers, |Pn| alone when nothing compensates.
    std::vector<double> analytic(omegas.size());
    if (config.choice == ControllerChoice::qdob) {
        QdobAnalysis analysis(config.controller);
        for (std::size_t i = 0; i < omegas.size(); ++i)
            analytic[i] = std::abs(analysis.sensitivity(omegas[i])) /
                          (inertia * omegas[i] * omegas[i]);
    } else if (config.choice == ControllerChoice::none) {
        for (std::size_t i = 0; i < omegas.size(); ++i)
            analytic[i] = 1.0 / (inertia * omegas[i] * omegas[i]);
    } else {
        const int order = config.choice == ControllerChoice::dob1 ? 1 : 4;
        ClassicDob dob(order, config.classic_cutoff, inertia, T);
        for (std::size_t i = 0; i < omegas.size(); ++i) {
            const std::complex<double> q = dob.q_path().response(omegas[i], T);
            analytic[i] =
                std::abs(1.0 - q) / (inertia * omegas[i] * omegas[i]);
        }
    }

    std::string body = "omega,measured_re,measured_im,measured_db,analytic_db,deviation_db\n";
    double worst_dev = 0.0;
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double meas_db = mag_db(std::abs(measured.response[i]));
        const double ref_db = mag_db(analytic[i]);
        const double dev = meas_db - ref_db;
        worst_dev = std::max(worst_dev, std::abs(dev));
        detail::append_shortest(body, omegas[i]);
        body += ',';
        detail::append_shortest(body, measured.response[i].real());
        body += ',';
        detail::append_shortest(body, measured.response[i].imag());
        body += ',';
        detail::append_shortest(body, meas_db);
        body += ',';
        detail::append_shortest(body, ref_db);
        body += ',';
        detail::append_shortest(body, dev);
        body += '\n';
    }
    const std::string path = join(out_dir, "sweep.csv");
    write_text(path, body);
    if (!quiet)
        log << "sweep: " << omegas.size() << " frequencies, worst |deviation| "
            << worst_dev << " dB, written to " << path << "\n";
    return {path};
}

std::vector<std::string> cmd_simulate(const ExperimentConfig& config,
                                      const std::string& out_dir, std::ostream& log,
                                      bool quiet) {
    prepare_out_dir(out_dir);
    const double T = config.controller.sample_time;

    PlantDoubleIntegrator plant(config.controller.inertia, T);
    DisturbanceGenerator gen(config.disturbance, T, config.seed);
    std::shared_ptr<Compensator> comp = make_compensator(config);

    SimOptions opts;
    opts.duration = config.duration;
    opts.use_outer_pd = config.outer_pd.enabled;
    if (config.outer_pd.enabled)
        opts.pd_gains = pd_gains_for_bandwidth(
            config.controller.inertia, config.outer_pd.omega_n,
            config.outer_pd.filter_g);

    const SimTrace trace = run_closed_loop(plant, comp.get(), gen, opts);

    const std::string trace_path = join(out_dir, "simulate_trace.csv");
    save_trace_csv(trace, trace_path);

    // Post-settling window: drop the first four disturbance cycles (or a
    // quarter of the run when the profile has no cycle), trimmed to whole
    // cycles so the spectral numbers are not windowing artifacts.
    const auto& profile = config.disturbance;
    const bool cyclic = profile.kind == DisturbanceKind::fourier_periodic ||
                        profile.kind == DisturbanceKind::quasiperiodic_drift;
    std::size_t settle = trace.size() / 4;
    if (cyclic) {
        const std::size_t cycle = static_cast<std::size_t>(gen.cycle_steps());
        settle = std::min(4 * cycle, trace.size() / 2);
        const std::size_t whole =
            ((trace.size() - settle) / cycle) * cycle;
        settle = trace.size() - whole;
    }

    auto rms = [](const std::vector<double>& v, std::size_t from) {
        if (from >= v.size()) return 0.0;
        double acc = 0.0;
        for (std::size_t k = from; k < v.size(); ++k) acc += v[k] * v[k];
        return std::sqrt(acc / static_cast<double>(v.size() - from));
    };

    json summary;
    summary["samples"] = trace.size();
    summary["duration"] = config.duration;
    summary["controller"] = to_string(config.choice);
    summary["outer_pd"] = config.outer_pd.enabled;
    summary["rms_error_full"] = rms(trace.e, 0);
    summary["rms_error_settled"] = rms(trace.e, settle);
    summary["rms_estimate_residual"] = [&] {
        std::vector<double> resid(trace.size());
        for (std::size_t k = 0; k < trace.size(); ++k)
            resid[k] = trace.d[k] - trace.dhat[k];
        return rms(resid, settle);
    }();

    if (cyclic && settle < trace.size()) {
        const long n_win = static_cast<long>(trace.size() - settle);
        const double w0 = 2.0 * std::numbers::pi / profile.period;
        const std::size_t harmonics =
            std::max(profile.sine.size(),
                     profile.cosine.size() > 1 ? profile.cosine.size() - 1 : 0);
        json att = json::array();
        for (std::size_t n = 1; n <= harmonics; ++n) {
            const double w = static_cast<double>(n) * w0;
            const auto yb = single_bin_dft(trace.y.data() + settle, n_win,
                                           static_cast<long>(settle), w, T);
            const auto db = single_bin_dft(trace.d.data() + settle, n_win,
                                           static_cast<long>(settle), w, T);
            json row;
            row["harmonic"] = n;
            row["omega"] = w;
            if (std::abs(db) > 0.0)
                row["y_over_d_db"] = mag_db(std::abs(yb) / std::abs(db));
            att.push_back(row);
        }
        summary["harmonic_response"] = att;

        const std::vector<double> tail(trace.y.begin() + static_cast<long>(settle),
                                       trace.y.end());
        if (static_cast<long>(tail.size()) >= 4 * gen.cycle_steps()) {
            const LiftedSpectrum ls = lifted_spectrum(tail, profile.period, T);
            const double band = profile.drift_cutoff > 0.0
                                    ? profile.drift_cutoff
                                    : 0.1 * std::numbers::pi / profile.period;
            summary["lifted_fraction_above_band"] = ls.energy_above(band);
            summary["lifted_band"] = band;
        }
    }
    for (const auto& w : trace.warnings) {
        summary["warnings"].push_back(w);
        if (!quiet) log << "warning: " << w << "\n";
    }

    const std::string summary_path = join(out_dir, "simulate_summary.json");
    write_text(summary_path, summary.dump(2) + "\n");
    if (!quiet)
        log << "simulate: " << trace.size() << " samples, settled error RMS "
            << summary["rms_error_settled"].get<double>() << ", written to "
            << out_dir << "\n";
    return {trace_path, summary_path};
}

StabilityReport cmd_stability(const ExperimentConfig& config,
                              const std::string& out_dir, std::ostream& log,
                              bool quiet) {
    prepare_out_dir(out_dir);
    QdobAnalysis analysis(config.controller);
    const std::vector<double> grid =
        default_analysis_grid(config.controller, config.grid_points_per_decade);

    StabilityReport report = check_nominal_stability(analysis, grid);
    const double bound = config.uncertainty_bound;
    const StabilityReport robust = check_robust_stability(
        analysis, [bound](double) { return bound; }, grid);
    report.robust_ok = robust.robust_ok;
    report.worst_product = robust.worst_product;
    report.worst_omega = robust.worst_omega;

    json j;
    j["nominal_ok"] = report.nominal_ok;
    j["phase_min_deg"] = report.phase_min * 180.0 / std::numbers::pi;
    j["phase_max_deg"] = report.phase_max * 180.0 / std::numbers::pi;
    j["premise_violations"] = report.premise_violations;
    j["max_amplitude_excess"] = report.max_amplitude_excess;
    j["phase_failures"] = report.phase_failures;
    j["robust_ok"] = report.robust_ok;
    j["uncertainty_bound"] = bound;
    j["worst_product"] = report.worst_product;
    j["worst_omega"] = report.worst_omega;
    write_text(join(out_dir, "stability_report.json"), j.dump(2) + "\n");

    if (!quiet)
        log << "stability: nominal " << (report.nominal_ok ? "ok" : "FAILED")
            << " (phase " << j["phase_min_deg"].get<double>() << " .. "
            << j["phase_max_deg"].get<double>() << " deg, "
            << report.premise_violations.size()
            << " premise exclusions), robust "
            << (report.robust_ok ? "ok" : "FAILED") << " (worst product "
            << report.worst_product << " at " << report.worst_omega
            << " rad/s)\n";
    return report;
}

std::vector<std::string> cmd_tune_check(const ExperimentConfig& config,
                                        std::ostream& log, bool quiet) {
    config.controller.validate();       // throws with the full violation list
    config.disturbance.validate();

    const MultistagePlan plan = plan_multistage(
        config.controller.sample_time, config.controller.period,
        config.controller.omega_a, config.controller.stage_count,
        config.controller.max_order);

    std::vector<std::string> warnings = config.controller.lint();
    if (plan.gain_bound_warning) {
        std::string w = "cascade passband ripple exceeds 1 + 1e-3 (max gain ";
        detail::append_shortest(w, plan.max_gain_seen);
        w += "); suppression notches may be shallower than designed";
        warnings.push_back(std::move(w));
    }

    if (!quiet) {
        log << "plan: period " << plan.total_delay_steps << " samples, order "
            << plan.order << ", residual delay " << plan.residual_delay_steps
            << " samples\n";
        for (std::size_t i = 0; i < plan.stages.size(); ++i) {
            const auto& st = plan.stages[i];
            log << "  stage " << (i + 1) << ": cutoff " << st.cutoff
                << " rad/s, tap spacing " << st.stage_steps << " samples\n";
        }
        for (const auto& w : warnings) log << "warning: " << w << "\n";
        if (warnings.empty()) log << "tune-check: clean\n";
    }
    return warnings;
}

}  // namespace qdob
