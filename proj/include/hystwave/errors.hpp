#pragma once

#include <stdexcept>
#include <string>

namespace hystwave {

// Every failure the library reports derives from Error so callers can catch
// one type; the subclasses let the CLI map failures onto exit codes.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-positive play threshold.
class InvalidThreshold : public Error {
 public:
  using Error::Error;
};

/// Quadrature or time grid too coarse / inconsistent.
class GridError : public Error {
 public:
  using Error::Error;
};

/// Density or scenario misconfiguration (bad parameters, unvalidated constants).
class ConfigurationError : public Error {
 public:
  using Error::Error;
};

/// A_R <= 0 on the requested convexity domain.
class DegenerateDensity : public ConfigurationError {
 public:
  using ConfigurationError::ConfigurationError;
};

/// 1/2 A_R - R C_R <= 0; carries the largest R found feasible by bisection.
class ConvexityRadiusTooLarge : public ConfigurationError {
 public:
  ConvexityRadiusTooLarge(const std::string& what, double suggested_R)
      : ConfigurationError(what), suggested_R_(suggested_R) {}
  double suggested_R() const { return suggested_R_; }

 private:
  double suggested_R_;
};

/// Mismatched series lengths or coefficient index ranges.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// Hysteresis memory did not reach its periodic regime after the warm-up.
class MemoryNotPeriodic : public Error {
 public:
  using Error::Error;
};

}  // namespace hystwave
