#pragma once

#include <vector>

namespace qdob {

// Blackman window sample at tap offset n for half-order N (|n| <= N).
double blackman_window(int n, int order);

// Ideal low-pass impulse-response sample for cutoff omega (rad/s) at a stage
// that samples every stage_period seconds: the inverse transform of a brick
// wall, i.e. a sinc scaled so the DC sum approaches 1 as the order grows.
double lowpass_coeff(int n, double omega, double stage_period);

// One linear-phase low-pass stage: 2N+1 Blackman-windowed sinc taps spaced
// stage_steps base samples apart, normalized to unit DC gain.
struct FirStage {
    int order = 0;                 // N: taps run n = -N..N
    int stage_steps = 1;           // realized tap spacing in base-rate samples
    double stage_period = 0.0;     // design tap spacing in seconds (sets coeffs)
    double tap_spacing = 0.0;      // realized spacing in seconds; the planner
                                   // sets it to stage_steps * T, which differs
                                   // from stage_period by the rounding
    double cutoff = 0.0;           // rad/s
    std::vector<double> coeffs;    // 2N+1 entries, symmetric, sum == 1
    double normalizer = 0.0;       // raw coefficient sum divided out

    // Real (signed) frequency-response amplitude of the zero-phase core at
    // omega rad/s, evaluated at the realized tap spacing; the realized stage
    // adds a pure delay of order*stage_steps base samples on top of this.
    double amplitude(double omega) const;
};

// Designs one stage. Throws config_error for non-positive inputs and
// aliasing_error when the cutoff reaches the stage Nyquist rate
// (stage_period * omega >= pi). stage_steps is left at 1; the multistage
// planner assigns it.
FirStage design_fir_stage(double omega, double stage_period, int order);

}  // namespace qdob
