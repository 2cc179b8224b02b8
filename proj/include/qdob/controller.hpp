#pragma once

#include <memory>
#include <string>
#include <vector>

#include "qdob/compensator.hpp"
#include "qdob/delay_line.hpp"
#include "qdob/inverse_plant.hpp"
#include "qdob/multistage.hpp"

namespace qdob {

// The nine knobs of the quasiperiodic disturbance observer.
//
// Units: period and sample_time in seconds; omega_a, omega_b, rho in rad/s;
// inertia in kg m^2. r, u and dhat share torque units; y is position.
struct QdobConfig {
    int mu = 1;              // 0 = estimate only (u == r), 1 = compensate
    int stage_count = 3;     // cascade stages l
    int max_order = 256;     // per-stage FIR half-order cap
    double omega_a = 0.0;    // final cascade cutoff: highest suppressed band
    double omega_b = 0.0;    // inverse-plant low-pass cutoff
    double rho = 0.0;        // half-width of each suppressed band (-3 dB)
    double period = 0.0;     // fundamental period of the disturbance
    double inertia = 0.0;    // plant rigid-body inertia M
    double sample_time = 0.0;

    // Hard invariants. Throws config_error listing every violated field.
    void validate() const;

    // Advisory tuning checks (never throws): returns human-readable
    // warnings, e.g. omega_b not well above omega_a, or no harmonic of the
    // fundamental below omega_a.
    std::vector<std::string> lint() const;

    bool operator==(const QdobConfig&) const = default;
};

// Maps the suppressed-band half-width rho to the loop cutoff:
//   omega_c = (2/L) tan(L*rho/2)
// The prewarp makes the realized -3 dB points of the band-stops land at
// n*omega_0 +/- rho despite the period-length delay in the loop.
// Domain: 0 <= rho < pi/L (throws config_error at or beyond the pole).
double compute_omega_c(double rho, double period);

// Real-time observer. Per step k:
//
//   xi_k   = inverse-plant estimate of the filtered total torque
//   dhat_k = g1*(xi_k - r_k) + cascade(lam history)
//   lam_k  = g1*(xi_k - r_k) - g2*dhat_k          (pushed into the cascade)
//   u_k    = r_k - mu*dhat_k
//
// with g1 = wcL/((1-mu)wcL + 2), g2 = ((1-mu)wcL - 2)/((1-mu)wcL + 2),
// wcL = omega_c * period. mu is baked in at construction: the lam history
// stored under one gain set is meaningless under the other, so switching
// mid-run is deliberately not offered.
class QdobController final : public Compensator {
public:
    explicit QdobController(const QdobConfig& cfg);

    CompensatorOutput step(double r, double y) override;
    void reset() override;

    const QdobConfig& config() const { return cfg_; }
    const MultistagePlan& plan() const { return cascade_.plan(); }
    double omega_c() const { return omega_c_; }
    double gain_direct() const { return g1_; }    // g1
    double gain_recycle() const { return g2_; }   // g2

private:
    QdobConfig cfg_;
    double omega_c_;
    double g1_, g2_;
    InversePlantFilter inverse_plant_;
    MultistageFilter cascade_;
    long steps_ = 0;
};

}  // namespace qdob
