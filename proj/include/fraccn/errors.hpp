#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace fraccn {

// Raised for inputs outside a parameter domain (r < 1, N = 0, alpha not in
// (0,1), ...). The CLI maps this to exit code 2.
class ParameterError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Level index or history length out of range.
class IndexError : public std::out_of_range {
public:
    using std::out_of_range::out_of_range;
};

// Vector or history length does not match what the operation needs.
class DimensionError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Base of every numerical failure. The CLI maps this to exit code 1.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Cholesky pivot or CG curvature p'Bp was not positive: the matrix is not SPD.
class SolverBreakdown : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Iterative method (CG, Newton) ran out of iterations.
class NotConverged : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Sherman-Morrison denominator 1 + beta g'B^{-1}g vanished.
class SingularUpdate : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// First-level system lost coercivity, (1 - sigma) tau_1 >= 1.
class IndefiniteSystem : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Wraps a failure inside a time step with the level at which it occurred.
class LevelFailure : public NumericalError {
public:
    LevelFailure(std::size_t level, const std::string& what)
        : NumericalError("level " + std::to_string(level) + ": " + what), level_(level) {}

    std::size_t level() const noexcept { return level_; }

private:
    std::size_t level_;
};

}  // namespace fraccn
