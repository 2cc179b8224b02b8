#include "qdob/disturbance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "qdob/multistage.hpp"  // round_half_away
#include "qdob/fir_design.hpp"  // blackman_window

namespace qdob {

namespace {

bool all_finite(const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
}

}  // namespace

void DisturbanceProfile::validate() const {
    std::vector<std::string> bad;
    const bool fourier = kind == DisturbanceKind::fourier_periodic ||
                         kind == DisturbanceKind::quasiperiodic_drift;
    if (fourier) {
        if (!(std::isfinite(period) && period > 0.0))
            bad.emplace_back("period must be positive");
        if (!all_finite(cosine) || !all_finite(sine))
            bad.emplace_back("Fourier coefficients must be finite");
        if (cosine.empty() && sine.empty())
            bad.emplace_back("at least one Fourier coefficient is required");
    }
    if (kind == DisturbanceKind::quasiperiodic_drift) {
        if (!(std::isfinite(drift_depth) && drift_depth >= 0.0))
            bad.emplace_back("drift_depth must be >= 0");
        if (!(std::isfinite(drift_cutoff) && drift_cutoff >= 0.0))
            bad.emplace_back("drift_cutoff must be >= 0");
    }
    if (kind == DisturbanceKind::sinusoid &&
        !(std::isfinite(amplitude) && std::isfinite(frequency) && frequency > 0.0))
        bad.emplace_back("sinusoid needs finite amplitude and positive frequency");
    if (kind == DisturbanceKind::constant && !std::isfinite(level))
        bad.emplace_back("constant level must be finite");
    if (!bad.empty()) {
        std::string msg = "invalid disturbance profile:";
        for (const auto& b : bad) msg += "\n  - " + b;
        throw config_error(msg);
    }
}

DisturbanceGenerator::DisturbanceGenerator(DisturbanceProfile profile,
                                           double sample_time, std::uint64_t seed)
    : profile_(std::move(profile)), sample_time_(sample_time), rng_(seed) {
    profile_.validate();
    if (!(sample_time > 0.0))
        throw config_error("DisturbanceGenerator: sample time must be positive");

    const bool fourier = profile_.kind == DisturbanceKind::fourier_periodic ||
                         profile_.kind == DisturbanceKind::quasiperiodic_drift;
    if (fourier) {
        cycle_steps_ = round_half_away(profile_.period / sample_time_);
        if (cycle_steps_ < 2)
            throw config_error("DisturbanceGenerator: period must span at least two samples");
    }

    if (profile_.kind == DisturbanceKind::quasiperiodic_drift) {
        // Smoother design: low-pass across cycles with cutoff at half the
        // declared band limit; the order is raised until the windowed-sinc
        // transition band (about 5.5/(N*Tc) rad/s wide for a Blackman
        // window, Tc = one cycle) fits inside the remaining half, so that
        // the wander truly lives below the limit, not just nominally.
        const double band = profile_.drift_cutoff > 0.0
                                ? profile_.drift_cutoff
                                : 0.1 * std::numbers::pi / profile_.period;
        const double cyc = cycle_steps_ * sample_time_;
        const double cutoff = 0.5 * band;
        const double taps_needed = 5.5 * 2.0 * std::numbers::pi / (cyc * (band - cutoff));
        env_order_ = static_cast<int>(std::ceil((taps_needed - 1.0) / 2.0));
        env_order_ = std::max(env_order_, 1);

        smoother_.resize(static_cast<std::size_t>(2 * env_order_ + 1));
        double energy = 0.0;
        for (int n = -env_order_; n <= env_order_; ++n) {
            const double h = (n == 0) ? cyc * cutoff / std::numbers::pi
                                      : std::sin(n * cyc * cutoff) /
                                            (n * std::numbers::pi);
            const double c = blackman_window(n, env_order_) * h;
            smoother_[static_cast<std::size_t>(n + env_order_)] = c;
            energy += c * c;
        }
        // Unit-energy taps: the smoothed unit-variance noise keeps unit
        // variance, so drift_depth is exactly the envelope's std deviation.
        const double norm = std::sqrt(energy);
        for (double& c : smoother_) c /= norm;

        const std::size_t harmonics = std::max(
            profile_.sine.size(),
            profile_.cosine.size() > 1 ? profile_.cosine.size() - 1 : 0);
        white_.assign(harmonics, {});
        env_.assign(harmonics, {});
    }
}

double DisturbanceGenerator::gauss() {
    // Box-Muller on raw engine draws; std::normal_distribution is not
    // pinned by the standard, and traces must reproduce bit for bit on
    // every platform.
    if (have_spare_) {
        have_spare_ = false;
        return spare_;
    }
    const double u1 =
        (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(rng_() >> 11) * 0x1.0p-53;  // [0, 1)
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    have_spare_ = true;
    return radius * std::cos(angle);
}

void DisturbanceGenerator::extend_envelopes(long cycle) {
    if (env_.empty()) return;
    const std::size_t span = static_cast<std::size_t>(2 * env_order_);
    const std::size_t white_needed = static_cast<std::size_t>(cycle) + span + 1;

    // Draws grow cycle-major across all harmonics, so the stream a given
    // (harmonic, cycle) pair sees never depends on query order.
    while (white_[0].size() < white_needed)
        for (auto& w : white_) w.push_back(gauss());

    for (std::size_t h = 0; h < env_.size(); ++h) {
        auto& env = env_[h];
        while (env.size() <= static_cast<std::size_t>(cycle)) {
            const std::size_t c = env.size();
            double acc = 0.0;
            for (std::size_t i = 0; i <= span; ++i)
                acc += smoother_[i] * white_[h][c + i];
            env.push_back(1.0 + profile_.drift_depth * acc);
        }
    }
}

double DisturbanceGenerator::at_step(long k) {
    if (k < 0) throw config_error("DisturbanceGenerator: negative step index");
    const double t = k * sample_time_;

    switch (profile_.kind) {
        case DisturbanceKind::constant:
            return profile_.level;
        case DisturbanceKind::sinusoid:
            return profile_.amplitude * std::sin(profile_.frequency * t);
        default:
            break;
    }

    // Fourier kinds: the intra-cycle time restarts every rnd(period/T)
    // samples, so each cycle is sample-exactly congruent (with constant
    // envelopes the signal is exactly periodic in the realized period).
    const long cycle = k / cycle_steps_;
    const double tau = static_cast<double>(k % cycle_steps_) * sample_time_;
    const double w0 = 2.0 * std::numbers::pi / profile_.period;

    const bool drift = profile_.kind == DisturbanceKind::quasiperiodic_drift;
    if (drift) extend_envelopes(cycle);

    double d = profile_.cosine.empty() ? 0.0 : 0.5 * profile_.cosine[0];
    const std::size_t harmonics = std::max(
        profile_.sine.size(), profile_.cosine.size() > 1 ? profile_.cosine.size() - 1 : 0);
    for (std::size_t n = 1; n <= harmonics; ++n) {
        const double a = n < profile_.cosine.size() ? profile_.cosine[n] : 0.0;
        const double b = n <= profile_.sine.size() ? profile_.sine[n - 1] : 0.0;
        const double phase = static_cast<double>(n) * w0 * tau;
        double term = a * std::cos(phase) + b * std::sin(phase);
        if (drift) term *= env_[n - 1][static_cast<std::size_t>(cycle)];
        d += term;
    }
    return d;
}

double DisturbanceGenerator::at_time(double t) {
    return at_step(round_half_away(t / sample_time_));
}

}  // namespace qdob
