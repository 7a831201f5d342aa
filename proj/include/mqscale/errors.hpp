#pragma once

#include <stdexcept>
#include <string>

namespace mqscale {

/// Bad chain length, window or grid parameters.
class ConfigError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// A closed form was evaluated at a point where its denominator vanishes.
class SingularInputError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

/// Input matrix violates a structural precondition (Hermiticity, physicality).
class ValidationError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

/// Linear algebra failure: eigen-solver non-convergence, singular system,
/// or a map output that breaks positivity.
class NumericError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Dense simulation would exceed the memory guard.
class ResourceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace mqscale
