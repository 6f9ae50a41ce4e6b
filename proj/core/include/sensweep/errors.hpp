#pragma once

#include <stdexcept>
#include <string>

namespace sensweep {

// Bad or inconsistent input data / configuration.
struct validation_error : std::runtime_error {
    explicit validation_error(const std::string& msg) : std::runtime_error(msg) {}
};

// A numerical or combinatorial guard refused to proceed (enumeration too
// large, undefined variance, ...).
struct guard_error : std::runtime_error {
    explicit guard_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sensweep
