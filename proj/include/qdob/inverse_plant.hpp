#pragma once

#include <cmath>

#include "qdob/errors.hpp"

namespace qdob {

// Band-limited inverse of the rigid-body plant 1/(M s^2): a first-order
// low-pass with cutoff omega_b composed with M s^2, discretized by the
// backward difference. Feeding it the measured position y reconstructs the
// low-pass-filtered total torque acting on the plant.
//
//   xi_k = [T*xi_{k-1} + M*omega_b*(y_k - 2*y_{k-1} + y_{k-2})] / (T*(1 + omega_b*T))
class InversePlantFilter {
public:
    InversePlantFilter(double inertia, double omega_b, double base_period)
        : m_(inertia), wb_(omega_b), t_(base_period) {
        if (!(inertia > 0.0) || !(omega_b > 0.0) || !(base_period > 0.0))
            throw config_error("InversePlantFilter: inertia, omega_b, base period must be positive");
    }

    double step(double y) {
        if (!std::isfinite(y)) throw numeric_fault("inverse_plant input", steps_);
        double xi = (t_ * xi1_ + m_ * wb_ * (y - 2.0 * y1_ + y2_)) / (t_ * (1.0 + wb_ * t_));
        y2_ = y1_;
        y1_ = y;
        xi1_ = xi;
        ++steps_;
        return xi;
    }

    void reset() {
        y1_ = y2_ = xi1_ = 0.0;
        steps_ = 0;
    }

private:
    double m_, wb_, t_;
    double y1_ = 0.0, y2_ = 0.0, xi1_ = 0.0;
    long steps_ = 0;
};

}  // namespace qdob
