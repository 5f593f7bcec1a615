#pragma once

#include "sburgers/spectral.hpp"

#include <stdexcept>
#include <string>

namespace sburgers {

/// Malformed or inconsistent configuration (CLI exit status 2).
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A trajectory produced a non-finite coefficient.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(double time, SpectralField last_finite_state)
      : std::runtime_error("integration blew up at t=" + std::to_string(time)),
        time_(time),
        last_finite_(std::move(last_finite_state)) {}

  double time() const { return time_; }
  const SpectralField& last_finite_state() const { return last_finite_; }

 private:
  double time_;
  SpectralField last_finite_;
};

/// Raised when an estimate is requested from a run with aborted paths.
class InvalidEstimate : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace sburgers
