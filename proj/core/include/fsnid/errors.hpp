#pragma once

#include <stdexcept>
#include <string>

namespace fsnid {

// Bad user input: missing files, malformed CSV, invalid flags. CLI maps to exit 1.
class input_error : public std::runtime_error {
public:
    explicit input_error(const std::string& msg) : std::runtime_error(msg) {}
};

// Numerical failure during estimation or training. CLI maps to exit 2.
class numeric_error : public std::runtime_error {
public:
    explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fsnid
