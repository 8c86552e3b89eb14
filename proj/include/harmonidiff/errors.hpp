#pragma once

#include <stdexcept>
#include <string>

namespace harmonidiff {

// Base for everything thrown by this library.
class Error : public std::runtime_error {
public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Unreadable / unwritable / truncated files.
class IoError : public Error {
public:
    using Error::Error;
};

// Readable bytes, unsupported or corrupt encoding.
class FormatError : public Error {
public:
    using Error::Error;
};

// A precondition of an operation was violated by the caller.
class ContractError : public Error {
public:
    using Error::Error;
};

// Source does not fit inside the target at the requested origin.
class PlacementError : public Error {
public:
    using Error::Error;
};

// Iterative solver failed to reach tolerance.
class ConvergenceError : public Error {
public:
    ConvergenceError(const std::string& msg, double residual)
        : Error(msg), residual_(residual) {}
    double residual() const { return residual_; }

private:
    double residual_;
};

// Metric undefined for the given inputs (empty region, too few samples, ...).
class MetricError : public Error {
public:
    using Error::Error;
};

// Numerical failure (non-PSD covariance, matrix square root breakdown).
class NumericError : public Error {
public:
    using Error::Error;
};

// Malformed JSON or similar; carries best-effort line info in the message.
class ParseError : public Error {
public:
    using Error::Error;
};

// Structurally valid input with invalid field values.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Bad pipeline configuration.
class ConfigError : public Error {
public:
    using Error::Error;
};

}  // namespace harmonidiff
