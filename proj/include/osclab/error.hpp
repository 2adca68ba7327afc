#pragma once

#include <stdexcept>
#include <string>

namespace osclab {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad argument value (q < 1, wrong placement, shape mismatch, ...).
class ParameterError : public Error {
 public:
  using Error::Error;
};

/// A cube that leaves the grid or touches an inactive cell.
class InvalidCubeError : public Error {
 public:
  using Error::Error;
};

/// Malformed or unreadable OLF1/OLM1 input.
class FileFormatError : public Error {
 public:
  using Error::Error;
};

/// Argument outside the domain of a constitutive or kinematic map
/// (non-SPD strain, non-positive Jacobian, Dirichlet mismatch, ...).
class InadmissibleError : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure failed to make progress.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace osclab
