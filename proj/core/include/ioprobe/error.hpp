#pragma once

#include <stdexcept>
#include <string>

namespace ioprobe {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Signal/plant dimensions do not line up.
class DimensionError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain of the operation (zero vector, dt <= 0, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// A state-space model failed the stability check.
class StabilityError : public Error {
 public:
  using Error::Error;
};

/// G^T G is singular (g0 == 0) or a quadratic form that must be positive is not.
class SingularOperatorError : public Error {
 public:
  using Error::Error;
};

/// An iteration produced a (numerically) zero vector; restart from another input.
class DegenerateInputError : public Error {
 public:
  using Error::Error;
};

/// Noisy quadratic form came out with the wrong sign; redraw the noise and retry.
class NoisyRetryError : public Error {
 public:
  using Error::Error;
};

/// The session's sample budget cannot cover the requested probe.
class BudgetError : public Error {
 public:
  using Error::Error;
};

/// The saddle-point iteration left the neighbourhood where it is known to converge.
class DivergenceError : public Error {
 public:
  using Error::Error;
};

/// ODE integration failed (RHS budget exceeded or step-size underflow).
class FlowError : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent configuration / input file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace ioprobe
