#pragma once

#include <stdexcept>
#include <string>

namespace gapspec {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Argument outside the domain of the operation (real z, point in a gap, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

// Malformed or inconsistent input configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// A structural invariant of an input type does not hold.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

// Quadrature, extrapolation or a nonlinear solve did not reach its tolerance.
class NumericError : public Error {
 public:
  NumericError(const std::string& what, double achieved)
      : Error(what + " (achieved " + std::to_string(achieved) + ")"), achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  double achieved_;
};

}  // namespace gapspec
