#include "qdob/fir_design.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qdob/errors.hpp"

namespace qdob {

double blackman_window(int n, int order) {
    if (order < 1)
        throw config_error("blackman_window: order must be >= 1");
    if (n < -order || n > order)
        throw config_error("blackman_window: |n| must be <= order");
    const double x = static_cast<double>(n) * std::numbers::pi / order;
    return 0.42 + 0.5 * std::cos(x) + 0.08 * std::cos(2.0 * x);
}

double lowpass_coeff(int n, double omega, double stage_period) {
    if (n == 0) return stage_period * omega / std::numbers::pi;
    return std::sin(n * stage_period * omega) / (n * std::numbers::pi);
}

double FirStage::amplitude(double omega) const {
    // Symmetric taps: the zero-phase core is c0 + 2 sum_n c_n cos(n*s*w)
    // with s the realized tap spacing in seconds.
    const int n_half = order;
    double acc = coeffs[static_cast<std::size_t>(n_half)];
    for (int n = 1; n <= n_half; ++n)
        acc += 2.0 * coeffs[static_cast<std::size_t>(n_half + n)] *
               std::cos(n * tap_spacing * omega);
    return acc;
}

FirStage design_fir_stage(double omega, double stage_period, int order) {
    if (!(omega > 0.0) || !(stage_period > 0.0) || order < 1)
        throw config_error("design_fir_stage: cutoff, stage period and order must be positive");
    if (stage_period * omega >= std::numbers::pi)
        throw aliasing_error("design_fir_stage: cutoff " + std::to_string(omega) +
                             " rad/s at or above the stage Nyquist rate " +
                             std::to_string(std::numbers::pi / stage_period) + " rad/s");

    FirStage st;
    st.order = order;
    st.stage_steps = 1;
    st.stage_period = stage_period;
    st.tap_spacing = stage_period;
    st.cutoff = omega;
    st.coeffs.resize(static_cast<std::size_t>(2 * order + 1));

    double sum = 0.0;
    for (int n = -order; n <= order; ++n) {
        const double c = blackman_window(n, order) * lowpass_coeff(n, omega, stage_period);
        st.coeffs[static_cast<std::size_t>(n + order)] = c;
        sum += c;
    }
    st.normalizer = sum;
    for (double& c : st.coeffs) c /= sum;
    return st;
}

}  // namespace qdob
