#pragma once

#include <stdexcept>
#include <string>

namespace modsim {

/// Base class for all errors raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed or inconsistent input files.
class LoadError : public Error {
 public:
  using Error::Error;
};

/// Invalid user configuration (maps to CLI exit code 1).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Destination not reachable from origin.
class NoPathError : public Error {
 public:
  NoPathError(long long origin, long long destination)
      : Error("no path from node " + std::to_string(origin) + " to node " +
              std::to_string(destination)),
        origin_(origin),
        destination_(destination) {}

  long long origin() const noexcept { return origin_; }
  long long destination() const noexcept { return destination_; }

 private:
  long long origin_;
  long long destination_;
};

class CalibrationError : public Error {
 public:
  using Error::Error;
};

class PlanError : public Error {
 public:
  using Error::Error;
};

}  // namespace modsim
