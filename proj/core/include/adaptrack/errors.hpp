#pragma once

#include <stdexcept>
#include <string>

namespace adaptrack {

// Base class for all library errors.
struct Error : std::runtime_error {
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A non-finite value showed up during integration. Carries the time at
// which the integrator first saw it.
struct NumericalBlowup : Error {
  NumericalBlowup(const std::string& what, double when)
      : Error(what + " (t = " + std::to_string(when) + ")"), time(when) {}
  double time;
};

struct NotHurwitz : Error {
  using Error::Error;
};

struct SolveFailed : Error {
  using Error::Error;
};

struct NotSymmetric : Error {
  using Error::Error;
};

struct NoMatchingSolution : Error {
  using Error::Error;
};

struct NonPositiveLambdaEstimate : Error {
  using Error::Error;
};

struct InsufficientData : Error {
  using Error::Error;
};

struct UnsupportedWeight : Error {
  using Error::Error;
};

struct GridMismatch : Error {
  using Error::Error;
};

struct EmptyOrDegenerateLog : Error {
  using Error::Error;
};

struct DimensionMismatch : Error {
  using Error::Error;
};

// Configuration file problems; message carries "path:line" when known.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace adaptrack
