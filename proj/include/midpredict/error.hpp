#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace midpredict {

// Base for every error raised by the library.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Malformed input text (CSV rows, model files, config).
class ParseError : public Error {
public:
    ParseError(const std::string& source, std::size_t line, const std::string& what)
        : Error(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// Well-formed input that violates a domain invariant.
class ValidationError : public Error {
public:
    using Error::Error;
};

// Vector or matrix sizes that do not agree.
class DimensionError : public Error {
public:
    using Error::Error;
};

// Numerical procedure failed (non-finite loss, no convergence, degenerate problem).
class ComputationError : public Error {
public:
    using Error::Error;
};

// SMO ran out of iterations; carries the residual KKT gap.
class ConvergenceError : public ComputationError {
public:
    ConvergenceError(const std::string& what, double residual)
        : ComputationError(what), residual_(residual) {}

    double residual() const noexcept { return residual_; }

private:
    double residual_;
};

inline void require_same_dim(std::size_t expected, std::size_t actual, const char* what) {
    if (expected != actual) {
        throw DimensionError(std::string(what) + ": expected dimension " + std::to_string(expected) +
                             ", got " + std::to_string(actual));
    }
}

}  // namespace midpredict
