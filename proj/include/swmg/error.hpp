#pragma once

#include <stdexcept>
#include <string>

namespace swmg {

// Base of every error the library throws. The CLI maps the subclasses onto
// process exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Invalid parameters, malformed config documents, unknown keys.
class ConfigError : public Error {
 public:
  using Error::Error;
};

// Requested frequency or target has no propagating spin-wave mode.
class BandError : public Error {
 public:
  using Error::Error;
};

// Signal-processing failures: mismatched grids, no transition, vanishing
// amplitude.
class SignalError : public Error {
 public:
  using Error::Error;
};

// A calibration could not converge (dead channel, flat objective).
class CalibrationError : public Error {
 public:
  using Error::Error;
};

// Gate output phase fell outside both decode windows.
class IndeterminateError : public Error {
 public:
  using Error::Error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw ConfigError(message);
}

}  // namespace detail
}  // namespace swmg
