#pragma once

#include <stdexcept>
#include <string>

namespace qwsqueeze {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// Argument outside the domain of a function (negative temperature, ...).
class DomainError : public Error {
public:
  using Error::Error;
};

/// A steady-state amplitude denominator vanished.
class SingularityError : public Error {
public:
  using Error::Error;
};

/// The drift matrix is not strictly stable, so no steady state exists.
class StabilityError : public Error {
public:
  StabilityError(const std::string& what, double margin)
      : Error(what), margin_(margin) {}

  double margin() const noexcept { return margin_; }

private:
  double margin_;
};

/// A linear solve was too ill-conditioned to trust.
class ConditioningError : public Error {
public:
  using Error::Error;
};

/// An iterative eigenvalue computation failed.
class NumericalError : public Error {
public:
  using Error::Error;
};

/// Time integration hit its horizon before reaching the steady state.
class NonConvergenceError : public Error {
public:
  NonConvergenceError(const std::string& what, double residual, double time)
      : Error(what), residual_(residual), time_(time) {}

  double residual() const noexcept { return residual_; }
  double time() const noexcept { return time_; }

private:
  double residual_;
  double time_;
};

/// Invalid configuration or sweep specification.
class ConfigError : public Error {
public:
  using Error::Error;
};

/// Output could not be written.
class IoError : public Error {
public:
  using Error::Error;
};

}  // namespace qwsqueeze
