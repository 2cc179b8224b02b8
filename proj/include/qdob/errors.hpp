#pragma once

#include <stdexcept>
#include <string>

namespace qdob {

// Invalid parameters, invalid config files, infeasible designs. CLI maps
// this family to exit code 1.
class config_error : public std::invalid_argument {
public:
    explicit config_error(const std::string& what) : std::invalid_argument(what) {}
};

// A requested filter plan cannot be realized (e.g. the period is too short
// to host the cascade at the requested order).
class plan_infeasible : public config_error {
public:
    explicit plan_infeasible(const std::string& what) : config_error(what) {}
};

// A stage cutoff at or above its own Nyquist rate would alias.
class aliasing_error : public config_error {
public:
    explicit aliasing_error(const std::string& what) : config_error(what) {}
};

// A measurement was asked for on fewer samples than it needs.
class insufficient_data : public config_error {
public:
    explicit insufficient_data(const std::string& what) : config_error(what) {}
};

// A non-finite value appeared in a numeric pipeline. Carries where and when;
// simulation never clamps or silently propagates NaN. CLI exit code 2.
class numeric_fault : public std::runtime_error {
public:
    numeric_fault(const std::string& stage, long step_index)
        : std::runtime_error("numeric fault in '" + stage + "' at step " +
                             std::to_string(step_index)),
          stage_(stage),
          step_(step_index) {}

    const std::string& stage() const { return stage_; }
    long step() const { return step_; }

private:
    std::string stage_;
    long step_;
};

// Filesystem problems while writing artifacts. CLI exit code 3.
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace qdob
