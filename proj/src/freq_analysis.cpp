#include "qdob/freq_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <fstream>
#include <limits>
#include <mutex>
#include <numbers>

#include "float_text.hpp"

namespace qdob {

namespace {

constexpr double kPi = std::numbers::pi;

void check_range(double omega, double nyquist) {
    if (!(omega >= 0.0) || omega > nyquist * (1.0 + 1e-12))
        throw config_error("frequency out of analysis range [0, pi/T]");
}

}  // namespace

QdobAnalysis::QdobAnalysis(const QdobConfig& config)
    : cfg_(config),
      plan_(plan_multistage(config.sample_time, config.period, config.omega_a,
                            config.stage_count, config.max_order)),
      wcl_(compute_omega_c(config.rho, config.period) * config.period) {
    cfg_.validate();
}

double QdobAnalysis::stage_amplitude(double omega) const {
    check_range(omega, kPi / cfg_.sample_time);
    double a = 1.0;
    for (const auto& st : plan_.stages) a *= st.amplitude(omega);
    return a;
}

std::complex<double> QdobAnalysis::delay_path(double omega) const {
    const double a = stage_amplitude(omega);
    const double theta =
        static_cast<double>(plan_.total_delay_steps) * cfg_.sample_time * omega;
    return a * std::complex<double>(std::cos(theta), -std::sin(theta));
}

std::complex<double> QdobAnalysis::lowpass(double omega) const {
    check_range(omega, kPi / cfg_.sample_time);
    return cfg_.omega_b / std::complex<double>(cfg_.omega_b, omega);
}

std::complex<double> QdobAnalysis::comb_filter(double omega) const {
    const std::complex<double> phi = delay_path(omega);
    return wcl_ * (1.0 + phi) / ((wcl_ + 2.0) + (wcl_ - 2.0) * phi);
}

std::complex<double> QdobAnalysis::sensitivity(double omega) const {
    const std::complex<double> phi = delay_path(omega);
    const std::complex<double> wb = wcl_ * lowpass(omega);
    return 2.0 * (1.0 - phi) / ((wb + 2.0) + (wb - 2.0) * phi);
}

std::complex<double> QdobAnalysis::complementary(double omega) const {
    const std::complex<double> phi = delay_path(omega);
    const std::complex<double> wb = wcl_ * lowpass(omega);
    return wb * (1.0 + phi) / ((wb + 2.0) + (wb - 2.0) * phi);
}

std::complex<double> QdobAnalysis::open_loop(double omega) const {
    const std::complex<double> phi = delay_path(omega);
    const std::complex<double> den = 2.0 * (1.0 - phi);
    if (std::abs(den) == 0.0) {
        const double inf = std::numeric_limits<double>::infinity();
        return {inf, inf};
    }
    return wcl_ * lowpass(omega) * (1.0 + phi) / den;
}

double QdobAnalysis::loop_phase(double omega) const {
    // The loop transfer is (wcl/2) * B * (1+phi)/(1-phi) with
    // phi = a * exp(-j theta). Multiplying (1+phi)/(1-phi) through by the
    // conjugate denominator leaves (1 - a^2) - 2j*a*sin(theta) up to a
    // positive factor, so the phase survives even where the magnitude
    // diverges (a -> 1 at the harmonics).
    const double a = stage_amplitude(omega);
    const double theta =
        static_cast<double>(plan_.total_delay_steps) * cfg_.sample_time * omega;
    double phase = std::atan2(-2.0 * a * std::sin(theta), 1.0 - a * a) +
                   std::atan2(-omega, cfg_.omega_b);
    phase = std::remainder(phase, 2.0 * kPi);  // [-pi, pi]
    if (phase == -kPi) phase = kPi;            // half-open (-pi, pi]
    return phase;
}

double QdobAnalysis::complementary_bound(double omega) const {
    check_range(omega, kPi / cfg_.sample_time);
    if (omega <= cfg_.omega_a) {
        const double t = std::tan(0.5 * cfg_.period * omega);
        return wcl_ / std::sqrt(wcl_ * wcl_ + 4.0 * t * t);
    }
    const double wb = cfg_.omega_b;
    const double den = 4.0 * omega * omega + (2.0 + wcl_) * (2.0 + wcl_) * wb * wb;
    return wcl_ * wb / std::sqrt(den);
}

namespace {

template <typename F>
FrequencyResponse eval_grid(const std::vector<double>& omegas, const char* label,
                            F&& f) {
    FrequencyResponse fr;
    fr.omega = omegas;
    fr.label = label;
    fr.response.resize(omegas.size());
    const long n = static_cast<long>(omegas.size());
#pragma omp parallel for schedule(static)
    for (long i = 0; i < n; ++i)
        fr.response[static_cast<std::size_t>(i)] =
            f(omegas[static_cast<std::size_t>(i)]);
    return fr;
}

}  // namespace

FrequencyResponse QdobAnalysis::sensitivity(const std::vector<double>& omegas) const {
    for (double w : omegas) check_range(w, kPi / cfg_.sample_time);
    return eval_grid(omegas, "sensitivity", [this](double w) { return sensitivity(w); });
}

FrequencyResponse QdobAnalysis::complementary(const std::vector<double>& omegas) const {
    for (double w : omegas) check_range(w, kPi / cfg_.sample_time);
    return eval_grid(omegas, "complementary",
                     [this](double w) { return complementary(w); });
}

FrequencyResponse QdobAnalysis::comb_filter(const std::vector<double>& omegas) const {
    for (double w : omegas) check_range(w, kPi / cfg_.sample_time);
    return eval_grid(omegas, "comb_filter", [this](double w) { return comb_filter(w); });
}

FrequencyResponse QdobAnalysis::delay_path(const std::vector<double>& omegas) const {
    for (double w : omegas) check_range(w, kPi / cfg_.sample_time);
    return eval_grid(omegas, "delay_path", [this](double w) { return delay_path(w); });
}

FrequencyResponse QdobAnalysis::open_loop(const std::vector<double>& omegas) const {
    for (double w : omegas) check_range(w, kPi / cfg_.sample_time);
    return eval_grid(omegas, "open_loop", [this](double w) { return open_loop(w); });
}

std::vector<double> default_analysis_grid(const QdobConfig& config,
                                          int points_per_decade) {
    if (points_per_decade < 1)
        throw config_error("default_analysis_grid: points_per_decade must be >= 1");
    const double lo = 1e-2;
    const double hi = kPi / config.sample_time;

    std::vector<double> grid;
    const double decades = std::log10(hi / lo);
    const long count = static_cast<long>(std::ceil(decades * points_per_decade));
    grid.reserve(static_cast<std::size_t>(count) + 64);
    for (long i = 0; i <= count; ++i) {
        const double w = lo * std::pow(10.0, static_cast<double>(i) / points_per_decade);
        grid.push_back(std::min(w, hi));
    }
    grid.push_back(hi);

    // Exact harmonic and notch-shoulder frequencies, so claims that live
    // at those points are sampled rather than straddled. Cap the count so
    // absurdly long fundamental periods cannot blow up the grid.
    const double w0 = 2.0 * kPi / config.period;
    const long harmonics =
        std::min(static_cast<long>(hi / w0), static_cast<long>(65536));
    for (long n = 1; n <= harmonics; ++n) {
        const double wn = static_cast<double>(n) * w0;
        grid.push_back(wn);
        if (wn - config.rho > 0.0) grid.push_back(wn - config.rho);
        if (wn + config.rho <= hi) grid.push_back(wn + config.rho);
    }

    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());
    return grid;
}

StabilityReport check_nominal_stability(const QdobAnalysis& analysis,
                                        const std::vector<double>& grid) {
    if (grid.empty()) throw config_error("check_nominal_stability: empty grid");
    StabilityReport report;
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    for (double w : grid) {
        const double a = analysis.stage_amplitude(w);
        if (std::abs(a) > 1.0) {
            report.premise_violations.push_back(w);
            report.max_amplitude_excess =
                std::max(report.max_amplitude_excess, std::abs(a) - 1.0);
            continue;  // corridor argument assumes |a| <= 1 here
        }
        const double phase = analysis.loop_phase(w);
        lo = std::min(lo, phase);
        hi = std::max(hi, phase);
        if (!(phase > -kPi && phase <= 0.5 * kPi + 1e-9))
            report.phase_failures.push_back(w);
    }
    if (lo <= hi) {
        report.phase_min = lo;
        report.phase_max = hi;
    }
    report.nominal_ok = report.phase_failures.empty();
    return report;
}

StabilityReport check_robust_stability(
    const QdobAnalysis& analysis, const std::function<double(double)>& uncertainty,
    const std::vector<double>& grid) {
    if (grid.empty()) throw config_error("check_robust_stability: empty grid");
    if (!uncertainty) throw config_error("check_robust_stability: missing profile");
    StabilityReport report;
    for (double w : grid) {
        const double mag = uncertainty(w);
        if (!(std::isfinite(mag) && mag >= 0.0))
            throw config_error("uncertainty profile must be finite and >= 0");
        const double product = mag * analysis.complementary_bound(w);
        if (product > report.worst_product) {
            report.worst_product = product;
            report.worst_omega = w;
        }
    }
    report.robust_ok = report.worst_product <= 1.0;
    return report;
}

double LiftedSpectrum::energy_above(double nu_min) const {
    double above = 0.0;
    double total = 0.0;
    for (std::size_t m = 0; m < power.size(); ++m) {
        total += power[m];
        if (std::abs(nu[m]) > nu_min) above += power[m];
    }
    return total > 0.0 ? above / total : 0.0;
}

LiftedSpectrum lifted_spectrum(const std::vector<double>& x, double period,
                               double sample_time) {
    if (!(period > 0.0) || !(sample_time > 0.0))
        throw config_error("lifted_spectrum: period and sample time must be positive");
    const long cycle = round_half_away(period / sample_time);
    if (cycle < 1) throw config_error("lifted_spectrum: period shorter than one sample");
    const long frames = static_cast<long>(x.size()) / cycle;
    if (frames < 4)
        throw insufficient_data("lifted_spectrum: need at least 4 whole cycles, have " +
                                std::to_string(frames));

    LiftedSpectrum ls;
    ls.cycle_steps = cycle;
    ls.frame_count = frames;
    ls.sample_time = sample_time;
    ls.nu.resize(static_cast<std::size_t>(frames));
    ls.bins.assign(static_cast<std::size_t>(frames) * static_cast<std::size_t>(cycle),
                   {});
    ls.power.assign(static_cast<std::size_t>(frames), 0.0);

    const double base = 2.0 * kPi / (static_cast<double>(frames) *
                                     static_cast<double>(cycle) * sample_time);
    for (long m = 0; m < frames; ++m) {
        const long folded = (2 * m > frames) ? m - frames : m;
        ls.nu[static_cast<std::size_t>(m)] = base * static_cast<double>(folded);
    }

    for (std::size_t k = 0; k < static_cast<std::size_t>(frames * cycle); ++k)
        ls.total_energy += x[k] * x[k];

    // DFT along the cycle axis, one independent transform per intra-cycle
    // offset; O(frames^2 * cycle) but each bin row is independent.
#pragma omp parallel for schedule(static)
    for (long m = 0; m < frames; ++m) {
        const double step = -2.0 * kPi * static_cast<double>(m) / frames;
        double energy = 0.0;
        for (long tau = 0; tau < cycle; ++tau) {
            std::complex<double> acc = 0.0;
            for (long c = 0; c < frames; ++c) {
                const double ang = step * static_cast<double>(c);
                acc += x[static_cast<std::size_t>(c * cycle + tau)] *
                       std::complex<double>(std::cos(ang), std::sin(ang));
            }
            ls.bins[static_cast<std::size_t>(m * cycle + tau)] = acc;
            energy += std::norm(acc);
        }
        ls.power[static_cast<std::size_t>(m)] = energy / static_cast<double>(frames);
    }
    return ls;
}

std::complex<double> single_bin_dft(const double* x, long n, long k0, double omega,
                                    double sample_time) {
    if (n <= 0) throw config_error("single_bin_dft: empty window");
    const double dphi = -omega * sample_time;
    const std::complex<double> rot(std::cos(dphi), std::sin(dphi));
    std::complex<double> cur(std::cos(dphi * static_cast<double>(k0)),
                             std::sin(dphi * static_cast<double>(k0)));
    std::complex<double> acc = 0.0;
    for (long k = 0; k < n; ++k) {
        if ((k & 0xfff) == 0) {  // re-seat the rotator to stop drift
            const double ang = dphi * static_cast<double>(k0 + k);
            cur = {std::cos(ang), std::sin(ang)};
        }
        acc += x[k] * cur;
        cur *= rot;
    }
    return acc;
}

FrequencyResponse measure_gain_sweep(const std::function<SampleMap()>& make_system,
                                     const std::vector<double>& omegas,
                                     double sample_time, const SweepOptions& options) {
    if (!make_system) throw config_error("measure_gain_sweep: missing system factory");
    if (!(sample_time > 0.0))
        throw config_error("measure_gain_sweep: sample time must be positive");
    if (!(options.duration > 0.0) || options.transient_cut < 0.0 ||
        options.transient_cut >= options.duration)
        throw config_error("measure_gain_sweep: need 0 <= transient_cut < duration");
    if (!(options.amplitude > 0.0))
        throw config_error("measure_gain_sweep: amplitude must be positive");

    const double nyquist = kPi / sample_time;
    const long total = round_half_away(options.duration / sample_time);
    const long cut = round_half_away(options.transient_cut / sample_time);

    std::vector<long> window_len(omegas.size());
    std::vector<long> window_start(omegas.size());
    for (std::size_t i = 0; i < omegas.size(); ++i) {
        const double w = omegas[i];
        if (!(w > 0.0) || w > nyquist * (1.0 + 1e-12))
            throw config_error("measure_gain_sweep: frequencies must lie in (0, pi/T]");
        const double period = 2.0 * kPi / w;
        const double avail = static_cast<double>(total - cut) * sample_time;
        const long periods = static_cast<long>(std::floor(avail / period));
        if (periods < 2)
            throw insufficient_data(
                "measure_gain_sweep: fewer than two whole periods after the "
                "transient cut at omega = " +
                std::to_string(w));
        window_len[i] = round_half_away(static_cast<double>(periods) * period /
                                        sample_time);
        window_start[i] = total - window_len[i];
    }

    FrequencyResponse fr;
    fr.omega = omegas;
    fr.label = "measured";
    fr.response.resize(omegas.size());

    std::exception_ptr failure = nullptr;
    std::mutex failure_mutex;
    const long n = static_cast<long>(omegas.size());
#pragma omp parallel for schedule(dynamic)
    for (long i = 0; i < n; ++i) {
        try {
            const std::size_t idx = static_cast<std::size_t>(i);
            const double w = omegas[idx];
            SampleMap system = make_system();
            if (!system) throw config_error("measure_gain_sweep: factory returned null");

            const long len = window_len[idx];
            const long start = window_start[idx];
            std::vector<double> in(static_cast<std::size_t>(len));
            std::vector<double> out(static_cast<std::size_t>(len));
            for (long k = 0; k < total; ++k) {
                const double probe =
                    options.amplitude *
                    std::sin(w * static_cast<double>(k) * sample_time);
                const double response = system(probe);
                if (!std::isfinite(response))
                    throw numeric_fault("sweep system output", k);
                if (k >= start) {
                    in[static_cast<std::size_t>(k - start)] = probe;
                    out[static_cast<std::size_t>(k - start)] = response;
                }
            }

            long k0 = start;
            long m = len;
            if (options.difference && len > 1) {
                // The same first difference applied to both channels cancels
                // in the ratio but wipes out slow drift before correlation.
                for (long k = len - 1; k >= 1; --k) {
                    in[static_cast<std::size_t>(k)] -=
                        in[static_cast<std::size_t>(k - 1)];
                    out[static_cast<std::size_t>(k)] -=
                        out[static_cast<std::size_t>(k - 1)];
                }
                ++k0;
                --m;
            }
            const std::complex<double> num =
                single_bin_dft(out.data() + (options.difference ? 1 : 0), m, k0, w,
                               sample_time);
            const std::complex<double> den =
                single_bin_dft(in.data() + (options.difference ? 1 : 0), m, k0, w,
                               sample_time);
            fr.response[idx] = num / den;
        } catch (...) {
            std::lock_guard<std::mutex> lock(failure_mutex);
            if (!failure) failure = std::current_exception();
        }
    }
    if (failure) std::rethrow_exception(failure);
    return fr;
}

void save_response_csv(const FrequencyResponse& fr, const std::string& path) {
    std::string body = "omega,re,im,mag_db,phase_deg\n";
    body.reserve(fr.size() * 80 + 64);
    for (std::size_t i = 0; i < fr.size(); ++i) {
        const std::complex<double> h = fr.response[i];
        detail::append_shortest(body, fr.omega[i]);
        body += ',';
        detail::append_shortest(body, h.real());
        body += ',';
        detail::append_shortest(body, h.imag());
        body += ',';
        detail::append_shortest(body, 20.0 * std::log10(std::abs(h)));
        body += ',';
        detail::append_shortest(body, std::arg(h) * 180.0 / kPi);
        body += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open " + path + " for writing");
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw io_error("write failed for " + path);
}

void save_lifted_csv(const LiftedSpectrum& ls, const std::string& path) {
    std::string body = "# cycle_steps=" + std::to_string(ls.cycle_steps) +
                       " frame_count=" + std::to_string(ls.frame_count) +
                       " sample_time=";
    detail::append_shortest(body, ls.sample_time);
    body += "\nnu,power\n";
    for (std::size_t m = 0; m < ls.power.size(); ++m) {
        detail::append_shortest(body, ls.nu[m]);
        body += ',';
        detail::append_shortest(body, ls.power[m]);
        body += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw io_error("cannot open " + path + " for writing");
    f.write(body.data(), static_cast<std::streamsize>(body.size()));
    if (!f) throw io_error("write failed for " + path);
}

}  // namespace qdob
