#pragma once

#include <stdexcept>
#include <string>

namespace slm {

// Inputs that violate a documented precondition. The CLI maps these to exit 2.
class ValidationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Failures discovered while computing (no convergence, empty peak, ...).
// The CLI maps these to exit 1.
class ComputationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class DomainError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class RegimeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class SizeError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

class NoConvergenceError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class RootCountError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class OrderingViolation : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class EmptyPeakError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class WindowNotFoundError : public ComputationError {
public:
    using ComputationError::ComputationError;
};

class EmptyDataError : public ValidationError {
public:
    using ValidationError::ValidationError;
};

}  // namespace slm
