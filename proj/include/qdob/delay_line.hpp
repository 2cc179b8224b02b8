#pragma once

#include <cstddef>
#include <vector>

#include "qdob/errors.hpp"

namespace qdob {

// Fixed-capacity ring buffer of doubles, zero-initialized. at(0) is the most
// recently pushed sample, at(k) the one pushed k steps earlier. Reading a lag
// at or beyond capacity is a hard error: every consumer sizes its line at
// construction, so an out-of-range lag is a programming bug, not bad data.
class DelayLine {
public:
    explicit DelayLine(std::size_t capacity)
        : buf_(capacity, 0.0), head_(0) {
        if (capacity == 0) throw config_error("DelayLine capacity must be positive");
    }

    void push(double v) {
        head_ = (head_ == 0) ? buf_.size() - 1 : head_ - 1;
        buf_[head_] = v;
    }

    double at(std::size_t lag) const {
        if (lag >= buf_.size())
            throw config_error("DelayLine lag " + std::to_string(lag) +
                               " out of range (capacity " + std::to_string(buf_.size()) + ")");
        std::size_t idx = head_ + lag;
        if (idx >= buf_.size()) idx -= buf_.size();
        return buf_[idx];
    }

    std::size_t capacity() const { return buf_.size(); }

    void reset() {
        std::fill(buf_.begin(), buf_.end(), 0.0);
        head_ = 0;
    }

private:
    std::vector<double> buf_;
    std::size_t head_;  // index of the newest sample
};

}  // namespace qdob
