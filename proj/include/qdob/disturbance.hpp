#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "qdob/errors.hpp"

namespace qdob {

// What the synthetic disturbance source produces.
enum class DisturbanceKind {
    constant,            // d(t) = level
    sinusoid,            // d(t) = amplitude * sin(frequency * t)
    fourier_periodic,    // truncated Fourier series with fixed coefficients
    quasiperiodic_drift  // Fourier series with slowly wandering amplitudes
};

// For the Fourier kinds:
//   d(t) = cosine[0]/2 + sum_n ( cosine[n] cos(n w0 t) + sine[n-1] sin(n w0 t) )
// with w0 = 2*pi/period. cosine[0] follows the usual series convention
// (constant term a0/2); sine coefficients start at harmonic 1.
struct DisturbanceProfile {
    DisturbanceKind kind = DisturbanceKind::fourier_periodic;
    double period = 1.0;               // fundamental period [s]
    std::vector<double> cosine;        // a_n, n = 0, 1, 2, ...
    std::vector<double> sine;          // b_n, n = 1, 2, ...

    double drift_depth = 0.0;          // fractional amplitude wander (quasiperiodic)
    double drift_cutoff = 0.0;         // wander band limit rho_gen [rad/s];
                                       // 0 picks 0.1*pi/period

    double amplitude = 0.0;            // sinusoid kind
    double frequency = 0.0;            // sinusoid kind [rad/s]
    double level = 0.0;                // constant kind

    // Throws config_error listing problems (non-finite coefficients,
    // non-positive period where one is needed, ...).
    void validate() const;

    bool operator==(const DisturbanceProfile&) const = default;
};

// Deterministic disturbance sample stream. For quasiperiodic profiles every
// harmonic (n >= 1) gets its own envelope 1 + depth * w(c) that is constant
// within each fundamental cycle c; w comes from seeded white noise smoothed
// across cycles by a unit-energy windowed-sinc FIR whose cutoff sits at half
// the declared band limit and whose order is chosen so the transition band
// ends at the limit. That keeps essentially all cycle-to-cycle energy below
// drift_cutoff, which is what makes the signal quasiperiodic by construction.
// Cycles are quantized to whole samples (rnd(period/T)), aligning the
// envelope switching with the analysis frame length.
class DisturbanceGenerator {
public:
    DisturbanceGenerator(DisturbanceProfile profile, double sample_time,
                         std::uint64_t seed = 1);

    // Sample at step k (t = k*T). Deterministic in (profile, T, seed, k)
    // regardless of query order.
    double at_step(long k);

    // d(t) for t = k*T with k = rnd(t/T).
    double at_time(double t);

    const DisturbanceProfile& profile() const { return profile_; }
    long cycle_steps() const { return cycle_steps_; }
    double cycle_seconds() const { return cycle_steps_ * sample_time_; }

private:
    void extend_envelopes(long cycle);
    double gauss();

    DisturbanceProfile profile_;
    double sample_time_;
    long cycle_steps_ = 0;
    int env_order_ = 0;                      // smoother half-order
    std::vector<double> smoother_;           // 2*env_order_+1 taps, unit l2 norm
    std::vector<std::vector<double>> white_; // raw draws, one stream per harmonic,
                                             // grown cycle-major so query order
                                             // cannot change the draws
    std::vector<std::vector<double>> env_;   // env_[n-1][c] for harmonic n
    std::mt19937_64 rng_;                    // raw engine; gauss() maps draws
    bool have_spare_ = false;                // itself so streams match across
    double spare_ = 0.0;                     // standard libraries
};

}  // namespace qdob
