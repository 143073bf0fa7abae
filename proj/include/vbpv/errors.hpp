#pragma once

#include <stdexcept>
#include <string>

namespace vbpv {

// Bad user input: out-of-range values, malformed files, missing data.
// The CLI maps this to exit code 2.
class InputError : public std::runtime_error {
public:
    explicit InputError(const std::string& msg) : std::runtime_error(msg) {}
};

// A computation could not be completed (non-convergence, coverage gaps).
// The CLI maps this to exit code 3.
class ComputationError : public std::runtime_error {
public:
    explicit ComputationError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace vbpv
