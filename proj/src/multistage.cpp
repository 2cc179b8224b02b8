#include "qdob/multistage.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "qdob/errors.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace qdob {

long round_half_away(double x) { return std::llround(x); }

namespace {

// Dense-grid scan of the cascade's signed amplitude product, used by the
// planner to verify the unit-gain assumption the stability analysis rests
// on. Linear spacing catches the ripple peaks near the band edges, which
// log spacing under-samples.
double max_cascade_gain(const std::vector<FirStage>& stages, double nyquist) {
    constexpr int kPoints = 32768;
    double worst = 0.0;
#pragma omp parallel for reduction(max : worst) schedule(static)
    for (int i = 0; i <= kPoints; ++i) {
        const double w = nyquist * static_cast<double>(i) / kPoints;
        double a = 1.0;
        for (const auto& st : stages) a *= st.amplitude(w);
        worst = std::max(worst, std::abs(a));
    }
    return worst;
}

}  // namespace

MultistagePlan plan_multistage(double base_period, double period, double omega_a,
                               int stage_count, int max_order) {
    if (!(base_period > 0.0))
        throw config_error("plan_multistage: base period must be positive");
    if (!(omega_a > 0.0))
        throw config_error("plan_multistage: final cutoff must be positive");
    if (stage_count < 1)
        throw config_error("plan_multistage: need at least one stage");
    if (max_order < 1)
        throw config_error("plan_multistage: order cap must be >= 1");
    if (!(period > 2.0 * base_period))
        throw plan_infeasible("plan_multistage: period " + std::to_string(period) +
                              " s must exceed two samples (" +
                              std::to_string(2.0 * base_period) + " s)");
    if (base_period * omega_a >= std::numbers::pi)
        throw aliasing_error("plan_multistage: final cutoff at or above the Nyquist rate");

    MultistagePlan plan;
    plan.base_period = base_period;
    plan.period = period;
    plan.stage_count = stage_count;
    plan.total_delay_steps = round_half_away(period / base_period);
    plan.geometric_coeff =
        0.5 * std::pow(base_period * omega_a / std::numbers::pi, 1.0 / stage_count);

    // Cutoffs fall geometrically stage to stage: each stage's sampling
    // period is the previous stage's Nyquist period, and its cutoff sits at
    // the fixed fraction c of the new rate; the last stage lands on omega_a.
    std::vector<double> design_period(static_cast<std::size_t>(stage_count));
    std::vector<long> steps(static_cast<std::size_t>(stage_count));
    std::vector<double> cutoff(static_cast<std::size_t>(stage_count));
    long steps_sum = 0;
    for (int i = 0; i < stage_count; ++i) {
        const double u =
            (i == 0) ? base_period : std::numbers::pi / cutoff[static_cast<std::size_t>(i - 1)];
        design_period[static_cast<std::size_t>(i)] = u;
        steps[static_cast<std::size_t>(i)] = round_half_away(u / base_period);
        cutoff[static_cast<std::size_t>(i)] =
            (i == stage_count - 1) ? omega_a
                                   : 2.0 * std::numbers::pi * plan.geometric_coeff / u;
        if (steps[static_cast<std::size_t>(i)] < 1)
            throw plan_infeasible("plan_multistage: stage " + std::to_string(i + 1) +
                                  " rounds to zero samples");
        steps_sum += steps[static_cast<std::size_t>(i)];
    }

    const long order_fit = (plan.total_delay_steps - 1) / steps_sum;
    plan.order = static_cast<int>(std::min<long>(order_fit, max_order));
    if (plan.order < 1)
        throw plan_infeasible(
            "plan_multistage: period of " + std::to_string(plan.total_delay_steps) +
            " samples cannot host the cascade (stage spacing sum " +
            std::to_string(steps_sum) + ")");
    plan.residual_delay_steps = plan.total_delay_steps - plan.order * steps_sum;

    plan.stages.reserve(static_cast<std::size_t>(stage_count));
    for (int i = 0; i < stage_count; ++i) {
        FirStage st = design_fir_stage(cutoff[static_cast<std::size_t>(i)],
                                       design_period[static_cast<std::size_t>(i)],
                                       plan.order);
        st.stage_steps = static_cast<int>(steps[static_cast<std::size_t>(i)]);
        st.tap_spacing = st.stage_steps * base_period;
        plan.stages.push_back(std::move(st));
    }

    plan.max_gain_seen = max_cascade_gain(plan.stages, std::numbers::pi / base_period);
    plan.gain_bound_warning = plan.max_gain_seen > 1.0 + 1e-3;
    return plan;
}

// ---------------------------------------------------------------------------
// Incremental polyphase kernel.
//
// Each stage taps its input stream at lags {0, U, 2U, ..., 2N*U} (in base
// samples), so a sample only ever meets samples of its own residue class
// mod U. The stage therefore keeps U independent per-phase rings of the
// last 2N+1 samples, visited round-robin. Each ring is stored twice
// ("mirrored"): the sample is written at w and w + (2N+1), which makes the
// newest 2N+1 samples of that phase one contiguous, chronologically ordered
// slice — the tap dot is then a single unit-stride loop the compiler can
// vectorize.
// ---------------------------------------------------------------------------

MultistageFilter::MultistageFilter(const MultistagePlan& plan)
    : plan_(plan),
      history_(static_cast<std::size_t>(std::max<long>(plan.residual_delay_steps, 1))) {
    stage_state_.reserve(plan_.stages.size());
    for (const auto& st : plan_.stages) {
        StageState s;
        s.order = st.order;
        s.steps = st.stage_steps;
        s.phase = 0;
        const std::size_t window = static_cast<std::size_t>(2 * st.order + 1);
        s.ring.assign(static_cast<std::size_t>(s.steps) * 2 * window, 0.0);
        s.write_pos.assign(static_cast<std::size_t>(s.steps), 0);
        s.taps = st.coeffs;  // symmetric, so chronological == reversed order
        stage_state_.push_back(std::move(s));
    }
}

double MultistageFilter::advance_stage(StageState& st, double x) const {
    const int window = 2 * st.order + 1;
    const std::size_t base = static_cast<std::size_t>(st.phase) * 2 *
                             static_cast<std::size_t>(window);
    int w = st.write_pos[static_cast<std::size_t>(st.phase)];
    double* ring = st.ring.data() + base;
    ring[w] = x;
    ring[w + window] = x;

    // seg[i] is this phase's sample from (2N - i) taps ago; with symmetric
    // taps the coefficient for it is taps[i] either way.
    const double* seg = ring + w + 1;
    const double* taps = st.taps.data();
    double acc = 0.0;
    for (int i = 0; i < window; ++i) acc += seg[i] * taps[i];

    st.write_pos[static_cast<std::size_t>(st.phase)] = (w + 1 == window) ? 0 : w + 1;
    st.phase = (st.phase + 1 == st.steps) ? 0 : st.phase + 1;
    return acc;
}

double MultistageFilter::step_cascade() {
    // The newest pushed sample is one step old by contract, so the residual
    // delay of eta samples means reading the history at lag eta - 1.
    double x = history_.at(static_cast<std::size_t>(plan_.residual_delay_steps - 1));
    for (auto& st : stage_state_) x = advance_stage(st, x);
    return x;
}

void MultistageFilter::push(double v) { history_.push(v); }

void MultistageFilter::reset() {
    history_.reset();
    for (auto& st : stage_state_) {
        st.phase = 0;
        std::fill(st.ring.begin(), st.ring.end(), 0.0);
        std::fill(st.write_pos.begin(), st.write_pos.end(), 0);
    }
}

// ---------------------------------------------------------------------------
// Brute-force reference: one composite kernel over the pushed history.
// ---------------------------------------------------------------------------

CascadeReference::CascadeReference(const MultistagePlan& plan)
    : residual_(plan.residual_delay_steps),
      kernel_{1.0},
      hist_(1) {
    for (const auto& st : plan.stages) {
        // Upsample the stage taps to base rate, then convolve into the
        // running composite kernel.
        std::vector<double> up(static_cast<std::size_t>(2 * st.order) *
                                   static_cast<std::size_t>(st.stage_steps) + 1,
                               0.0);
        for (int j = 0; j <= 2 * st.order; ++j)
            up[static_cast<std::size_t>(j) * static_cast<std::size_t>(st.stage_steps)] =
                st.coeffs[static_cast<std::size_t>(j)];
        std::vector<double> next(kernel_.size() + up.size() - 1, 0.0);
        for (std::size_t a = 0; a < kernel_.size(); ++a)
            for (std::size_t b = 0; b < up.size(); ++b)
                next[a + b] += kernel_[a] * up[b];
        kernel_ = std::move(next);
    }
    hist_ = DelayLine(static_cast<std::size_t>(residual_) + kernel_.size());
}

double CascadeReference::step_cascade() const {
    double acc = 0.0;
    for (std::size_t m = 0; m < kernel_.size(); ++m)
        acc += kernel_[m] * hist_.at(static_cast<std::size_t>(residual_ - 1) + m);
    return acc;
}

void CascadeReference::push(double v) { hist_.push(v); }

void CascadeReference::reset() { hist_.reset(); }

}  // namespace qdob
