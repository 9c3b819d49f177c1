#pragma once

#include <stdexcept>
#include <string>

namespace adcslab {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ZeroQuaternionError : public Error {
 public:
  ZeroQuaternionError() : Error("cannot normalize a zero quaternion") {}
};

class SingularInertiaError : public Error {
 public:
  using Error::Error;
};

/// All catalog mass lies on a line, so the inertia tensor is singular about it.
class DegenerateCatalogError : public Error {
 public:
  using Error::Error;
};

class NonFiniteStateError : public Error {
 public:
  using Error::Error;
};

class InvalidArgumentError : public Error {
 public:
  using Error::Error;
};

class ZeroFieldError : public Error {
 public:
  ZeroFieldError() : Error("magnetic field is zero; dipole allocation undefined") {}
};

/// Raised while reading a config or catalog file. `where` names the JSON key path.
class ConfigError : public Error {
 public:
  ConfigError(const std::string& where, const std::string& what)
      : Error(where.empty() ? what : where + ": " + what) {}
};

}  // namespace adcslab
