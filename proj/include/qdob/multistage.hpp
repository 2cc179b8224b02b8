#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "qdob/delay_line.hpp"
#include "qdob/fir_design.hpp"

namespace qdob {

// Full design of the periodic-pass delay chain: l cascaded linear-phase
// low-pass stages plus a residual plain delay of eta base samples, arranged
// so the end-to-end group delay is exactly total_delay_steps samples.
struct MultistagePlan {
    double base_period = 0.0;           // T, seconds
    double period = 0.0;                // fundamental period, seconds
    int stage_count = 0;                // l
    int order = 0;                      // shared per-stage half-order N
    long total_delay_steps = 0;         // rnd(period / base_period)
    long residual_delay_steps = 0;      // eta = total - N * sum(stage_steps)
    double geometric_coeff = 0.0;       // c, sets intermediate cutoffs
    std::vector<FirStage> stages;       // cutoffs descend; last one is omega_a

    // Warning (not an error): the realized cascade's passband ripple pushed
    // the dense-grid gain above 1 + 1e-3 somewhere. Ppm-level ripple above
    // exactly 1.0 is normal and does not trip this.
    bool gain_bound_warning = false;
    double max_gain_seen = 0.0;

    long stage_steps_sum() const {
        long s = 0;
        for (const auto& st : stages) s += st.stage_steps;
        return s;
    }
};

// Integer rounding used throughout the planner: round half away from zero.
long round_half_away(double x);

// Builds the cascade design for fundamental period `period`, final cutoff
// omega_a, stage count l, and per-stage order cap max_order.
//
//   c    = (1/2) (T*omega_a/pi)^(1/l)
//   U_1  = T, U_i = pi/omega_{i-1}
//   w_i  = 2*pi*c/U_i for i < l, w_l = omega_a
//   N    = min(floor((Lbar-1)/sum(Ubar_i)), max_order)   (>= 1 or infeasible)
//   eta  = Lbar - N*sum(Ubar_i)                          (>= 1 by the N rule)
//
// Throws config_error / aliasing_error / plan_infeasible.
MultistagePlan plan_multistage(double base_period, double period, double omega_a,
                               int stage_count, int max_order);

// Stateful realization of the cascade. Call sequence per control step k:
//   double out = step_cascade();   // reads history; newest pushed value is
//                                  // treated as one step old
//   push(value_k);                 // then append this step's input
// The map from pushed values to step_cascade() outputs is LTI with unit DC
// gain and a group delay of exactly total_delay_steps samples.
//
// Each stage stores its input stream split into stage_steps interleaved
// phases so the per-step tap dot runs over unit-stride memory (at most two
// contiguous segments of a small ring). See CascadeReference for the
// brute-force equivalent used to validate this kernel.
class MultistageFilter {
public:
    explicit MultistageFilter(const MultistagePlan& plan);

    double step_cascade();
    void push(double v);
    void reset();

    const MultistagePlan& plan() const { return plan_; }

private:
    struct StageState {
        int order;                   // N
        int steps;                   // tap spacing in base samples
        int phase;                   // which interleaved phase is current
        std::vector<double> ring;    // steps * 2*(2N+1), phase-major; each
                                     // phase ring is mirrored so the newest
                                     // 2N+1 samples are always contiguous
        std::vector<int> write_pos;  // per-phase cursor, cycles 0..2N
        std::vector<double> taps;    // == coeffs (symmetric, so chronological
                                     // and lag order coincide)
    };

    double advance_stage(StageState& st, double x) const;

    MultistagePlan plan_;
    DelayLine history_;  // pushed values; the cascade reads it at the residual lag
    std::vector<StageState> stage_state_;
};

// Reference implementation: collapses the whole cascade into one composite
// FIR kernel over the pushed-value history and evaluates it by direct dot
// product every step (O(total kernel length) instead of O(sum of stage
// orders)). Kept for tests and benchmarks; results must match
// MultistageFilter to floating-point roundoff.
class CascadeReference {
public:
    explicit CascadeReference(const MultistagePlan& plan);

    double step_cascade() const;
    void push(double v);
    void reset();

    std::size_t kernel_length() const { return kernel_.size(); }

private:
    long residual_;
    std::vector<double> kernel_;
    DelayLine hist_;
};

}  // namespace qdob
