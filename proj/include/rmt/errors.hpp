#pragma once

#include <stdexcept>
#include <string>

namespace rmt {

// Bad input: malformed spectrum, out-of-range knob, invalid contour layout request.
class InvalidArgument : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

// Base for failures of a numerical method on valid input.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class PoleProximityError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class RootSelectionError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ConvergenceError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

class ContourError : public NumericalError {
public:
    using NumericalError::NumericalError;
};

}  // namespace rmt
