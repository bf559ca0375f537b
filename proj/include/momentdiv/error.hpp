#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace momentdiv {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed coefficient expression. `offset()` is the byte offset of the
/// offending token in the source string.
class ParseError : public Error {
public:
    ParseError(const std::string& what, std::size_t offset)
        : Error(what + " at offset " + std::to_string(offset)), offset_(offset) {}

    std::size_t offset() const noexcept { return offset_; }

private:
    std::size_t offset_;
};

/// Coefficient evaluation left its mathematical domain (log of a non-positive
/// number, division by zero, ...).
class EvalError : public Error {
public:
    using Error::Error;
};

/// Invalid argument or configuration passed to a solver or the simulator.
class ConfigError : public Error {
public:
    using Error::Error;
};

/// A numerical procedure failed: no bracket, integration blow-up, domain
/// exhausted after growth, non-convergence.
class NumericError : public Error {
public:
    using Error::Error;
};

}  // namespace momentdiv
