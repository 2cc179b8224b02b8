#pragma once

namespace qdob {

// One inner-loop step: the compensator sees the outer command r_k and the
// measured output y_k, and produces the plant input u_k plus its current
// disturbance estimate dhat_k.
struct CompensatorOutput {
    double u = 0.0;
    double dhat = 0.0;
};

// Common face of the disturbance-estimating inner controllers (the
// periodic-pass observer and the classic low-pass baselines), so the
// closed-loop runner and the CLI can swap them freely.
class Compensator {
public:
    virtual ~Compensator() = default;
    virtual CompensatorOutput step(double r, double y) = 0;
    virtual void reset() = 0;
};

}  // namespace qdob
