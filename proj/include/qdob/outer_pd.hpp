#pragma once

#include "qdob/errors.hpp"

namespace qdob {

// Position loop wrapped around the torque-level compensator. Produces the
// torque reference
//   r = Kp*e + Kd*e_rate + M*accel_ff,
// where e_rate is a filtered derivative of the tracking error e and
// accel_ff is a filtered second derivative of the position command. Both
// derivatives come from the same first-order pseudo-differentiator
//   z_dot = G*(x - z),  rate = G*(x - z),
// discretized with backward Euler: z_k = (z_{k-1} + T*G*x_k)/(1 + T*G).
struct OuterPdGains {
    double kp = 0.0;
    double kd = 0.0;
    double filter_g = 40.0;  // pseudo-differentiator bandwidth [rad/s]
};

class OuterPdController {
public:
    OuterPdController(OuterPdGains gains, double inertia, double sample_time)
        : gains_(gains), m_(inertia), t_(sample_time) {
        if (!(sample_time > 0.0) || !(inertia > 0.0) || !(gains.filter_g > 0.0))
            throw config_error("OuterPdController: inertia, sample time, filter_g must be positive");
    }

    // One sample: position command, measured position -> torque reference.
    double step(double cmd, double y) {
        double e = cmd - y;
        double e_rate = rate(err_state_, e);
        double cmd_rate = rate(cmd_state_, cmd);
        double cmd_accel = rate(cmd_rate_state_, cmd_rate);
        return gains_.kp * e + gains_.kd * e_rate + m_ * cmd_accel;
    }

    void reset() { err_state_ = cmd_state_ = cmd_rate_state_ = 0.0; }

    const OuterPdGains& gains() const { return gains_; }

private:
    double rate(double& state, double x) {
        double g = gains_.filter_g;
        state = (state + t_ * g * x) / (1.0 + t_ * g);
        return g * (x - state);
    }

    OuterPdGains gains_;
    double m_, t_;
    double err_state_ = 0.0, cmd_state_ = 0.0, cmd_rate_state_ = 0.0;
};

// Critically damped gain choice for a target natural frequency:
// kp = M*wn^2, kd = 2*M*wn.
inline OuterPdGains pd_gains_for_bandwidth(double inertia, double omega_n,
                                           double filter_g = 40.0) {
    if (!(inertia > 0.0) || !(omega_n > 0.0) || !(filter_g > 0.0))
        throw config_error("pd_gains_for_bandwidth: all arguments must be positive");
    return OuterPdGains{inertia * omega_n * omega_n, 2.0 * inertia * omega_n, filter_g};
}

}  // namespace qdob
