#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace scinv {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DimensionMismatch : public Error {
 public:
  using Error::Error;
};

class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A halfspace normal whose norm is at or below the degenerate tolerance.
class DegenerateNormal : public Error {
 public:
  using Error::Error;
};

class EmptyPolytope : public Error {
 public:
  using Error::Error;
};

class UnboundedPolytope : public Error {
 public:
  using Error::Error;
};

/// The simplex exceeded its iteration cap.
class NumericalFailure : public Error {
 public:
  using Error::Error;
};

/// A fixed-point recursion hit its iteration cap.
class NonConvergence : public Error {
 public:
  using Error::Error;
};

/// A controller was asked for an input at a state whose admissible set is empty.
class ControllerInfeasible : public Error {
 public:
  using Error::Error;
};

/// The trajectory archive cannot produce a full-rank regressor window.
class InsufficientExcitation : public Error {
 public:
  using Error::Error;
};

/// Regression residual too large for noiseless LTI data.
class ResidualTooLarge : public Error {
 public:
  using Error::Error;
};

/// A learned halfspace failed to cut off the failure it was learned from.
class FailureNotExcluded : public Error {
 public:
  using Error::Error;
};

class ConfigError : public Error {
 public:
  using Error::Error;
};

/// An error raised inside one experiment stage, tagged with its module.
class StageError : public Error {
 public:
  StageError(std::string module, const std::string& what) : Error(module + ": " + what), module_(std::move(module)) {}

  const std::string& module() const { return module_; }

 private:
  std::string module_;
};

}  // namespace scinv
