#include "qdob/baselines.hpp"

#include <cmath>
#include <complex>

namespace qdob {

Poly poly_mul(const Poly& a, const Poly& b) {
    if (a.empty() || b.empty()) return {};
    Poly out(a.size() + b.size() - 1, 0.0);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
}

Poly poly_add(const Poly& a, const Poly& b) {
    Poly out(std::max(a.size(), b.size()), 0.0);
    for (std::size_t i = 0; i < a.size(); ++i) out[i] += a[i];
    for (std::size_t i = 0; i < b.size(); ++i) out[i] += b[i];
    return out;
}

Poly poly_scale(const Poly& a, double k) {
    Poly out = a;
    for (double& v : out) v *= k;
    return out;
}

DiscreteRational discretize_backward_euler(const Poly& num_s, const Poly& den_s,
                                           double sample_time) {
    if (num_s.empty() || den_s.empty())
        throw config_error("discretize_backward_euler: empty polynomial");
    if (!(sample_time > 0.0))
        throw config_error("discretize_backward_euler: sample time must be positive");

    // s^k -> ((1-q)/T)^k; clearing denominators with the common factor T^m
    // turns coefficient i into coeff * (1-q)^i * T^(m-i).
    const std::size_t m = std::max(num_s.size(), den_s.size()) - 1;
    const Poly one_minus_q{1.0, -1.0};

    auto substitute = [&](const Poly& p) {
        Poly acc{0.0};
        Poly power{1.0};  // (1-q)^i
        for (std::size_t i = 0; i < p.size(); ++i) {
            const double scale = p[i] * std::pow(sample_time, static_cast<double>(m - i));
            acc = poly_add(acc, poly_scale(power, scale));
            power = poly_mul(power, one_minus_q);
        }
        return acc;
    };

    return {substitute(num_s), substitute(den_s)};
}

IirFilter::IirFilter(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) {
    if (den_.empty() || den_[0] == 0.0)
        throw config_error("IirFilter: leading denominator coefficient must be nonzero");
    if (num_.empty()) num_.assign(1, 0.0);
    const double a0 = den_[0];
    for (double& v : num_) v /= a0;
    for (double& v : den_) v /= a0;
    state_.assign(std::max(num_.size(), den_.size()) - 1, 0.0);
}

double IirFilter::peek(double x) const {
    return num_[0] * x + (state_.empty() ? 0.0 : state_[0]);
}

double IirFilter::commit(double x) {
    const double y = peek(x);
    const std::size_t n = state_.size();
    for (std::size_t i = 0; i < n; ++i) {
        const double b = (i + 1 < num_.size()) ? num_[i + 1] : 0.0;
        const double a = (i + 1 < den_.size()) ? den_[i + 1] : 0.0;
        state_[i] = b * x - a * y + (i + 1 < n ? state_[i + 1] : 0.0);
    }
    return y;
}

void IirFilter::reset() { std::fill(state_.begin(), state_.end(), 0.0); }

std::complex<double> IirFilter::response(double omega, double sample_time) const {
    const std::complex<double> q = std::exp(std::complex<double>(0.0, -omega * sample_time));
    auto horner = [&q](const Poly& p) {
        std::complex<double> acc = 0.0;
        for (std::size_t i = p.size(); i-- > 0;) acc = acc * q + p[i];
        return acc;
    };
    return horner(num_) / horner(den_);
}

namespace {

// Builds the two backward-Euler paths of the classic observer, {y path,
// u path}. They share the same denominator; IirFilter normalizes.
std::pair<DiscreteRational, DiscreteRational> classic_paths(int order, double g,
                                                            double inertia, double t) {
    if (order != 1 && order != 4)
        throw config_error("ClassicDob: supported orders are 1 and 4");
    if (!(g > 0.0) || !(inertia > 0.0) || !(t > 0.0))
        throw config_error("ClassicDob: cutoff, inertia and sample time must be positive");

    Poly q_num, q_den;
    if (order == 1) {
        q_num = {g};
        q_den = {g, 1.0};
    } else {
        // Binomial numerator kept at order 2 so Q * Ms^2 stays biproper.
        q_num = {std::pow(g, 4.0), 4.0 * std::pow(g, 3.0), 6.0 * g * g};
        q_den = {1.0};
        const Poly pole{g, 1.0};
        for (int i = 0; i < 4; ++i) q_den = poly_mul(q_den, pole);
    }
    const Poly ms2{0.0, 0.0, inertia};
    return {discretize_backward_euler(poly_mul(q_num, ms2), q_den, t),
            discretize_backward_euler(q_num, q_den, t)};
}

}  // namespace

ClassicDob::ClassicDob(std::pair<DiscreteRational, DiscreteRational> paths, double mu)
    : mu_(mu),
      q_of_y_(std::move(paths.first.num), std::move(paths.first.den)),
      q_of_u_(std::move(paths.second.num), std::move(paths.second.den)) {}

ClassicDob::ClassicDob(int order, double cutoff, double inertia, double sample_time,
                       double mu)
    : ClassicDob(classic_paths(order, cutoff, inertia, sample_time), mu) {}

CompensatorOutput ClassicDob::step(double r, double y) {
    if (!std::isfinite(r) || !std::isfinite(y))
        throw numeric_fault("classic observer input", steps_);

    // dhat = Fy(y) - Fq(u) with u = r - mu*dhat; Fq's feedthrough makes this
    // algebraic, solved exactly:
    const double fy = q_of_y_.peek(y);
    const double fq0 = q_of_u_.feedthrough();
    const double sq = q_of_u_.peek(0.0);  // state contribution alone
    const double dhat = (fy - fq0 * r - sq) / (1.0 - mu_ * fq0);
    const double u = r - mu_ * dhat;

    q_of_y_.commit(y);
    q_of_u_.commit(u);

    if (!std::isfinite(dhat))
        throw numeric_fault("classic observer estimate", steps_);
    ++steps_;
    return {u, dhat};
}

void ClassicDob::reset() {
    q_of_y_.reset();
    q_of_u_.reset();
    steps_ = 0;
}

}  // namespace qdob
