#pragma once

#include <complex>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "qdob/compensator.hpp"
#include "qdob/errors.hpp"

namespace qdob {

// Dense polynomial in q = z^{-1}: coeffs[i] multiplies q^i.
using Poly = std::vector<double>;

Poly poly_mul(const Poly& a, const Poly& b);
Poly poly_add(const Poly& a, const Poly& b);
Poly poly_scale(const Poly& a, double k);

// Maps a continuous-time rational num(s)/den(s) (ascending powers of s) to
// a discrete rational in q = z^{-1} under the backward-Euler substitution
// s <- (1 - q)/T. Both polynomials are scaled by T^max(deg) so the result
// stays polynomial even when the input is improper; the pair is NOT
// normalized (callers divide by den[0], which IirFilter does).
struct DiscreteRational {
    Poly num;
    Poly den;
};
DiscreteRational discretize_backward_euler(const Poly& num_s, const Poly& den_s,
                                           double sample_time);

// Direct-form II transposed SISO filter with a one-sample "peek": the
// disturbance-observer loop needs this sample's output as a function of
// this sample's input before committing state, because u feeds back
// through the filter algebraically. Numerator and denominator may have
// different lengths.
class IirFilter {
public:
    IirFilter(Poly num, Poly den);  // den[0] must be nonzero; normalizes by it

    double peek(double x) const;    // output if x were pushed now
    double commit(double x);        // push x, update state, return output
    void reset();

    const Poly& num() const { return num_; }
    const Poly& den() const { return den_; }
    double feedthrough() const { return num_[0]; }

    // Response at z = e^{j omega T}.
    std::complex<double> response(double omega, double sample_time) const;

private:
    Poly num_, den_;                // normalized, den_[0] == 1
    std::vector<double> state_;     // DF2T registers, state_[0] is next out's s1
};

// Conventional disturbance observer on the rigid-body plant 1/(Ms^2), for
// comparison against the comb-based controller. The estimate is
//   dhat = Q * (Pn^{-1} y - u),   u = r - mu * dhat,
// with a plain low-pass Q instead of the comb structure:
//   order 1:  Q(s) = g/(s+g)
//   order 4:  Q(s) = (c2 s^2 + c1 s + c0)/(s+g)^4,
//             c0 = g^4, c1 = 4g^3, c2 = 6g^2  (binomial numerator, kept at
//             order 2 so Q*Pn^{-1} is biproper),
// both paths discretized by backward Euler, the same rule the comb
// controller uses. u feeds back through Q's feedthrough term, so each step
// solves that algebraic loop exactly via the filter peek before committing
// both paths.
class ClassicDob final : public Compensator {
public:
    ClassicDob(int order, double cutoff, double inertia, double sample_time,
               double mu = 1.0);

    CompensatorOutput step(double r, double y) override;
    void reset() override;

    // The discrete Q (u path) and Q*Pn^{-1} (y path), normalized.
    const IirFilter& q_path() const { return q_of_u_; }
    const IirFilter& scaled_inverse_path() const { return q_of_y_; }

private:
    // paths = {y path, u path}, sharing a denominator.
    ClassicDob(std::pair<DiscreteRational, DiscreteRational> paths, double mu);

    double mu_;
    IirFilter q_of_y_;  // Q * Pn^{-1} acting on the measured position
    IirFilter q_of_u_;  // Q acting on the plant input
    long steps_ = 0;
};

}  // namespace qdob
