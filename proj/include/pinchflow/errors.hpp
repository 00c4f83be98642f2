#pragma once

#include <stdexcept>
#include <string>

namespace pinchflow {

/// Bad input: wrong shape, out-of-range index, invalid parameter.
/// CLI maps these to exit code 1.
class ValidationError : public std::runtime_error {
public:
    explicit ValidationError(const std::string& msg) : std::runtime_error(msg) {}
};

/// The computation itself failed (unstable step, lost graph property, ...).
/// CLI maps these to exit code 2.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace pinchflow
