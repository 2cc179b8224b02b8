#pragma once

#include <complex>
#include <functional>
#include <string>
#include <vector>

#include "qdob/controller.hpp"
#include "qdob/multistage.hpp"

namespace qdob {

// Sampled frequency response: response[i] is the complex gain at omega[i]
// [rad/s], grid strictly ascending.
struct FrequencyResponse {
    std::vector<double> omega;
    std::vector<std::complex<double>> response;
    std::string label;

    std::size_t size() const { return omega.size(); }
};

// Closed-form frequency-domain model of the comb compensator. All scalar
// evaluators are exact for the discrete implementation: the stage cascade
// is linear-phase with group delay of exactly the rounded period, so its
// response factors into a signed real amplitude times a pure delay. Grid
// overloads evaluate many frequencies at once and are parallelized when
// OpenMP is available; every point is independent.
//
// Valid frequency range is 0 <= omega <= pi/T (the base Nyquist rate);
// outside it the evaluators throw config_error.
class QdobAnalysis {
public:
    explicit QdobAnalysis(const QdobConfig& config);

    // Signed amplitude of the FIR stage cascade at omega (product over
    // stages; negative lobes carry through as negative values). Uses the
    // realized tap spacing (whole base samples), not the design spacing.
    double stage_amplitude(double omega) const;

    // Full response of the internal period-memory path:
    // stage_amplitude(omega) * exp(-j * omega * T * rounded_period_steps).
    std::complex<double> delay_path(double omega) const;

    // First-order measurement low-pass omega_b/(j omega + omega_b).
    std::complex<double> lowpass(double omega) const;

    // The comb-shaping filter built from the period-memory path; 1 at DC.
    std::complex<double> comb_filter(double omega) const;

    // Disturbance-to-output sensitivity of the compensated loop and its
    // complement. Computed from the closed fractional forms, which stay
    // finite everywhere (including the harmonics, where the loop transfer
    // itself blows up); their sum is identically 1.
    std::complex<double> sensitivity(double omega) const;
    std::complex<double> complementary(double omega) const;

    // Loop transfer = complementary/sensitivity. At frequencies where the
    // sensitivity is exactly zero the magnitude is reported as infinity;
    // meant for plots only — stability checks use loop_phase below.
    std::complex<double> open_loop(double omega) const;

    // Phase [rad] of the loop transfer, wrapped to (-pi, pi], computed from
    // the signed amplitude so it stays exact where the magnitude blows up
    // at the harmonics and where the cascade amplitude rings negative.
    double loop_phase(double omega) const;

    // Piecewise closed-form upper bound on |complementary| used by the
    // robust-stability test: a tangent-based branch at and below the final
    // stage cutoff, a low-pass-limited branch above it.
    double complementary_bound(double omega) const;

    // Grid versions (OpenMP-parallel), label filled in.
    FrequencyResponse sensitivity(const std::vector<double>& omegas) const;
    FrequencyResponse complementary(const std::vector<double>& omegas) const;
    FrequencyResponse comb_filter(const std::vector<double>& omegas) const;
    FrequencyResponse delay_path(const std::vector<double>& omegas) const;
    FrequencyResponse open_loop(const std::vector<double>& omegas) const;

    const MultistagePlan& plan() const { return plan_; }
    const QdobConfig& config() const { return cfg_; }
    double loop_gain() const { return wcl_; }  // omega_c * period

private:
    QdobConfig cfg_;
    MultistagePlan plan_;
    double wcl_;
};

// Log-spaced grid (points_per_decade, default 400) from 1e-2 rad/s up to
// the sampling Nyquist rate, augmented with every disturbance harmonic
// n*w0 and the two notch shoulder points n*w0 +/- rho, sorted and
// deduplicated. This is the grid the stability checks and CLI plots use
// by default, so the claims living at those exact frequencies are always
// sampled.
std::vector<double> default_analysis_grid(const QdobConfig& config,
                                          int points_per_decade = 400);

// Stability check results. check_nominal_stability fills the nominal
// section, check_robust_stability the robust one; each leaves the other
// at defaults.
struct StabilityReport {
    // Nominal: the loop-phase corridor test. Its premise is that the
    // period-memory path never exceeds unit amplitude; grid points where
    // the windowed FIR cascade overshoots 1 (ppm-level passband ripple)
    // are excluded from the corridor assertion and reported here instead.
    bool nominal_ok = false;
    double phase_min = 0.0;                  // over the asserted points [rad]
    double phase_max = 0.0;
    std::vector<double> premise_violations;  // omegas with amplitude > 1
    double max_amplitude_excess = 0.0;       // worst amplitude - 1 seen
    std::vector<double> phase_failures;      // omegas outside (-pi, pi/2]

    // Robust: small-gain test of bound(omega) * |complementary|.
    bool robust_ok = false;
    double worst_product = 0.0;
    double worst_omega = 0.0;
};

StabilityReport check_nominal_stability(const QdobAnalysis& analysis,
                                        const std::vector<double>& grid);

// Small-gain test against a multiplicative plant uncertainty profile:
// passes when uncertainty(omega) * complementary_bound(omega) <= 1
// across the grid. The profile must be positive on the grid.
StabilityReport check_robust_stability(
    const QdobAnalysis& analysis,
    const std::function<double(double)>& uncertainty,
    const std::vector<double>& grid);

// Cycle-synchronous spectral decomposition: the signal is cut into frames
// of one fundamental cycle, and each intra-cycle offset tau is transformed
// across frames (a DFT along the cycle axis). A perfectly cycle-periodic
// signal is constant along that axis, so all its cross-frame energy sits
// at zero frequency; energy found above any positive cross-frame frequency
// measures how non-periodic the signal is.
struct LiftedSpectrum {
    long cycle_steps = 0;     // frame length [samples]
    long frame_count = 0;     // whole frames used
    double sample_time = 0.0;

    // Signed cross-frame frequency per bin [rad/s], DFT order:
    // bin m maps to 2*pi*m / (frame_count * cycle_steps * T), folded to
    // the negative axis for m > frame_count/2.
    std::vector<double> nu;

    // Complex cycle-axis DFT, bin-major: bins[m * cycle_steps + tau].
    std::vector<std::complex<double>> bins;

    // Per-bin energy summed over tau, scaled so the bins sum to the
    // time-domain energy of the analyzed samples (Parseval).
    std::vector<double> power;
    double total_energy = 0.0;

    // Fraction of total energy at |nu| strictly above nu_min.
    double energy_above(double nu_min) const;
};

// Requires at least 4 whole cycles of samples (insufficient_data
// otherwise); trailing samples beyond the last whole cycle are dropped.
LiftedSpectrum lifted_spectrum(const std::vector<double>& x,
                               double period, double sample_time);

// Empirical transfer-function estimate by sinusoidal probing. make_system
// returns a fresh sample-in/sample-out map for each frequency (systems
// hold state, so each probe owns one). The probe runs for `duration`
// seconds, discards the first `transient_cut` seconds, trims the remainder
// down to the largest whole number of periods, and correlates input and
// output there (single-bin discrete Fourier sums); the gain is their
// ratio. With difference=true both signals are first-differenced before
// correlation, which removes slow drift without touching the ratio (the
// same linear map applied to both cancels). Fewer than two whole periods
// after trimming raises insufficient_data. Parallel over frequencies when
// OpenMP is available.
struct SweepOptions {
    double amplitude = 1.0;
    double duration = 60.0;       // [s] per frequency
    double transient_cut = 20.0;  // [s] discarded before measuring
    bool difference = true;
};

using SampleMap = std::function<double(double)>;

FrequencyResponse measure_gain_sweep(
    const std::function<SampleMap()>& make_system,
    const std::vector<double>& omegas, double sample_time,
    const SweepOptions& options = {});

// Single-bin discrete Fourier sum: sum_k x[k] exp(-j omega k T). The k
// index starts at k0 so windows cut from a longer record keep their phase.
std::complex<double> single_bin_dft(const double* x, long n, long k0,
                                    double omega, double sample_time);

// CSV export. Responses get columns omega, re, im, mag_db, phase_deg.
// Lifted spectra get one row per cross-frame bin (nu, power) after a
// comment row carrying frame geometry.
void save_response_csv(const FrequencyResponse& fr, const std::string& path);
void save_lifted_csv(const LiftedSpectrum& ls, const std::string& path);

}  // namespace qdob
