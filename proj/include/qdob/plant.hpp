#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "qdob/errors.hpp"

namespace qdob {

// Optional multiplicative model mismatch on the plant input: a scaled
// first-order rational factor with a pure delay,
//   delta(s) = gain * (tau_zero*s + 1)/(tau_pole*s + 1) * e^{-delay s},
// so the effective torque is (1 + delta) * u. Off by default; used for
// robust-stability experiments.
struct ModelError {
    bool enabled = false;
    double gain = 0.0;
    double tau_zero = 0.0;
    double tau_pole = 1e-3;
    int delay_steps = 0;
};

// Rigid-body plant x_ddot = (u + d)/M, integrated exactly under a
// zero-order hold on (u + d):
//   x += v*T + a*T^2/2;  v += a*T   with a = (u + d)/M.
// Exact integration keeps plant discretization error out of controller
// verification; only the controllers are approximated.
class PlantDoubleIntegrator {
public:
    PlantDoubleIntegrator(double inertia, double sample_time,
                          ModelError mismatch = {})
        : m_(inertia), t_(sample_time), mismatch_(mismatch) {
        if (!(inertia > 0.0) || !(sample_time > 0.0))
            throw config_error("PlantDoubleIntegrator: inertia and sample time must be positive");
        if (mismatch_.enabled) {
            if (!(mismatch_.tau_pole > 0.0) || mismatch_.delay_steps < 0)
                throw config_error("ModelError: tau_pole must be positive, delay_steps >= 0");
            delay_buf_.assign(static_cast<std::size_t>(mismatch_.delay_steps) + 1, 0.0);
        }
    }

    // Advances one sample with plant input u and matched disturbance d.
    void advance(double u, double d) {
        double torque = u + d;
        if (mismatch_.enabled) torque += perturbation(u);
        double a = torque / m_;
        x_ += v_ * t_ + 0.5 * a * t_ * t_;
        v_ += a * t_;
    }

    double position() const { return x_; }
    double velocity() const { return v_; }
    double inertia() const { return m_; }
    double sample_time() const { return t_; }

    void reset() {
        x_ = v_ = lag_state_ = 0.0;
        std::fill(delay_buf_.begin(), delay_buf_.end(), 0.0);
        delay_head_ = 0;
    }

private:
    double perturbation(double u) {
        // backward-difference realization of gain*(tau_z s + 1)/(tau_p s + 1)
        double a = mismatch_.tau_pole;
        double b = mismatch_.tau_zero;
        double f = (a * lag_state_ + (b + t_) * u - b * u_prev_) / (a + t_);
        u_prev_ = u;
        lag_state_ = f;
        double out = mismatch_.gain * f;
        if (!delay_buf_.empty()) {
            delay_buf_[delay_head_] = out;
            delay_head_ = (delay_head_ + 1) % delay_buf_.size();
            out = delay_buf_[delay_head_];
        }
        return out;
    }

    double m_, t_;
    ModelError mismatch_;
    double x_ = 0.0, v_ = 0.0;
    double lag_state_ = 0.0, u_prev_ = 0.0;
    std::vector<double> delay_buf_;
    std::size_t delay_head_ = 0;
};

}  // namespace qdob
