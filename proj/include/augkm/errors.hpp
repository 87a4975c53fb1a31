#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace augkm {

/// Invalid arguments: shape mismatches, out-of-range parameters, empty inputs.
class DomainError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// An iterative numerical routine failed to converge.
class NumericalError : public std::runtime_error {
public:
    NumericalError(const std::string& what, double residual)
        : std::runtime_error(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

/// Data has no variance where some is required.
class DegenerateDataError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file. `position` is a 1-based line number, or a 0-based
/// record index for binary formats.
class FormatError : public std::runtime_error {
public:
    FormatError(const std::string& what, std::size_t position)
        : std::runtime_error(what), position_(position) {}

    std::size_t position() const noexcept { return position_; }

private:
    std::size_t position_;
};

/// Experiment or generator configuration that cannot be satisfied.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace augkm
