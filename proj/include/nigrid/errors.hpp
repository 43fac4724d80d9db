#pragma once

#include <stdexcept>
#include <string>

namespace nigrid {

/// Base class for all library errors.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid input data (bad topology, malformed config, violated precondition).
class ValidationError : public Error {
public:
    using Error::Error;
};

/// Operand dimensions do not match.
class DimensionError : public Error {
public:
    using Error::Error;
};

/// Frequency-response evaluation requested at (or numerically on top of) a pole.
class PoleEvaluationError : public Error {
public:
    using Error::Error;
};

/// A required interconnection side condition does not hold.
class SideConditionError : public Error {
public:
    using Error::Error;
};

/// Simulation state became non-finite; carries the time of failure.
class DivergedError : public Error {
public:
    DivergedError(const std::string& what, double t)
        : Error(what), time_(t) {}

    double time() const { return time_; }

private:
    double time_;
};

}  // namespace nigrid
