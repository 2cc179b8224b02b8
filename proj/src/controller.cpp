#include "qdob/controller.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "qdob/errors.hpp"

namespace qdob {

void QdobConfig::validate() const {
    std::vector<std::string> bad;
    auto flag = [&bad](bool ok, const char* what) {
        if (!ok) bad.emplace_back(what);
    };
    flag(mu == 0 || mu == 1, "mu must be 0 or 1");
    flag(stage_count >= 1, "stage_count must be >= 1");
    flag(max_order >= 1, "max_order must be >= 1");
    flag(std::isfinite(omega_a) && omega_a > 0.0, "omega_a must be positive");
    flag(std::isfinite(omega_b) && omega_b > 0.0, "omega_b must be positive");
    flag(std::isfinite(period) && period > 0.0, "period must be positive");
    flag(std::isfinite(inertia) && inertia > 0.0, "inertia must be positive");
    flag(std::isfinite(sample_time) && sample_time > 0.0, "sample_time must be positive");
    flag(std::isfinite(rho) && rho > 0.0, "rho must be positive");
    if (std::isfinite(rho) && std::isfinite(period) && period > 0.0 &&
        rho >= std::numbers::pi / period)
        bad.emplace_back("rho must be below pi/period (suppressed bands may not touch)");
    if (!bad.empty()) {
        std::ostringstream msg;
        msg << "invalid controller config:";
        for (const auto& b : bad) msg << "\n  - " << b;
        throw config_error(msg.str());
    }
}

std::vector<std::string> QdobConfig::lint() const {
    std::vector<std::string> notes;
    if (omega_b < 5.0 * omega_a)
        notes.push_back(
            "omega_b should sit well above omega_a (want omega_b >= 5*omega_a; have " +
            std::to_string(omega_b) + " vs " + std::to_string(omega_a) +
            "): the measurement low-pass eats into the suppressed band");
    const double w0 = 2.0 * std::numbers::pi / period;
    if (w0 > omega_a)
        notes.push_back(
            "no harmonic of the fundamental (" + std::to_string(w0) +
            " rad/s) lies below omega_a (" + std::to_string(omega_a) +
            " rad/s): nothing is suppressed");
    return notes;
}

double compute_omega_c(double rho, double period) {
    if (!(period > 0.0))
        throw config_error("compute_omega_c: period must be positive");
    if (!(rho >= 0.0) || rho >= std::numbers::pi / period)
        throw config_error("compute_omega_c: rho must lie in [0, pi/period); the map "
                           "has a pole at the band half-spacing");
    return (2.0 / period) * std::tan(period * rho / 2.0);
}

namespace {
const QdobConfig& checked(const QdobConfig& cfg) {
    cfg.validate();
    return cfg;
}
}  // namespace

QdobController::QdobController(const QdobConfig& cfg)
    : cfg_(checked(cfg)),
      omega_c_(compute_omega_c(cfg.rho, cfg.period)),
      g1_(0.0),
      g2_(0.0),
      inverse_plant_(cfg.inertia, cfg.omega_b, cfg.sample_time),
      cascade_(plan_multistage(cfg.sample_time, cfg.period, cfg.omega_a,
                               cfg.stage_count, cfg.max_order)) {
    const double wcl = omega_c_ * cfg_.period;
    const double den = (1.0 - cfg_.mu) * wcl + 2.0;  // >= 2 for mu in {0,1}
    g1_ = wcl / den;
    g2_ = ((1.0 - cfg_.mu) * wcl - 2.0) / den;
}

CompensatorOutput QdobController::step(double r, double y) {
    if (!std::isfinite(r)) throw numeric_fault("controller reference input", steps_);
    const double xi = inverse_plant_.step(y);

    const double recycled = cascade_.step_cascade();
    const double e = xi - r;
    const double dhat = g1_ * e + recycled;
    const double lam = g1_ * e - g2_ * dhat;
    cascade_.push(lam);

    if (!std::isfinite(dhat))
        throw numeric_fault("controller disturbance estimate", steps_);
    ++steps_;
    // mu is an exact integer switch: mu = 0 leaves u = r bit for bit.
    return {r - cfg_.mu * dhat, dhat};
}

void QdobController::reset() {
    inverse_plant_.reset();
    cascade_.reset();
    steps_ = 0;
}

}  // namespace qdob
