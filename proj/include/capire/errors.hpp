#pragma once

#include <stdexcept>
#include <string>

namespace capire {

/// Base for every error raised by the library. Carries a single-line message.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that cannot be read or does not match its declared format.
/// `location()` is "file:line" when known, empty otherwise.
class InputError : public Error {
 public:
  InputError(std::string location, const std::string& message)
      : Error(location.empty() ? message : location + ": " + message),
        location_(std::move(location)) {}

  const std::string& location() const { return location_; }

 private:
  std::string location_;
};

/// Violated precondition on a well-formed value (unknown student, bad config, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Iterative method did not reach its tolerance.
class ConvergenceError : public Error {
 public:
  ConvergenceError(int iterations, double residual);

  int iterations() const { return iterations_; }
  double residual() const { return residual_; }

 private:
  int iterations_;
  double residual_;
};

}  // namespace capire
