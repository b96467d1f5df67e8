#pragma once

#include <stdexcept>
#include <string>

namespace partcouple {

/// Precondition of an operation was violated by the caller (length mismatch, bad parameter).
class ContractViolation : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Non-finite data or a numerically singular linear system.
class NumericError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// A Newton iteration blew up (residual norm beyond the divergence bound).
class DivergenceError : public NumericError {
public:
    using NumericError::NumericError;
};

/// An iteration hit its safety cap without meeting its convergence criterion.
class NonConvergenceError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace partcouple
