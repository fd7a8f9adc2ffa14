#pragma once

#include <stdexcept>
#include <string>

namespace pmgp {

// Input-side failures (bad arguments, malformed files). CLI exit code 2.
class InputError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DomainError : public InputError {
public:
    using InputError::InputError;
};

class DimensionError : public InputError {
public:
    using InputError::InputError;
};

// Non-increasing or duplicate timestamps.
class OrderingError : public InputError {
public:
    using InputError::InputError;
};

// Numerical failures. CLI exit code 3.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Derivative order beyond what the kernel supports (m > 2p).
class UnsupportedOrderError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

// Matrix still indefinite or singular after jitter escalation.
class ConditioningError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace pmgp
