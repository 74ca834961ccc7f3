#pragma once

#include <stdexcept>
#include <string>

namespace stocsf {

/// Thrown when an argument violates an operation's precondition.
class InvalidInput : public std::invalid_argument {
public:
    explicit InvalidInput(const std::string& what) : std::invalid_argument(what) {}
};

/// Thrown when a state or a computed field contains non-finite values,
/// or when a linear solve breaks down.
class NumericalStateError : public std::runtime_error {
public:
    explicit NumericalStateError(const std::string& what) : std::runtime_error(what) {}
};

/// Raised by a stepper when the length would become nonpositive.
/// Not an error: run_flow turns it into a "length collapse" stop.
class ShrinkSignal : public std::runtime_error {
public:
    explicit ShrinkSignal(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace stocsf
