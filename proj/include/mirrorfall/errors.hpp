#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mirrorfall {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A quantity is undefined for the given inputs (no gravitational scale,
/// z0 = 0, closed form used outside its validity window, ...).
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Inconsistent or unusable configuration: grid too small or too coarse,
/// unknown preset, malformed config file.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Special-function argument outside the supported range.
class RangeError : public Error {
 public:
  using Error::Error;
};

/// Spectral discretization cannot represent the requested state.
class ResolutionError : public Error {
 public:
  using Error::Error;
};

/// A solver contract (conservation, domain size, step accuracy) was broken
/// during a run. The CLI maps this family to exit status 2.
class ContractError : public Error {
 public:
  using Error::Error;
};

struct DriftHistory {
  std::vector<double> times;
  std::vector<double> norm_drift;
  std::vector<double> energy_drift;
};

class AccuracyError : public ContractError {
 public:
  AccuracyError(const std::string& what, DriftHistory history)
      : ContractError(what), history_(std::move(history)) {}

  const DriftHistory& history() const noexcept { return history_; }

 private:
  DriftHistory history_;
};

class DomainTooSmallError : public ContractError {
 public:
  using ContractError::ContractError;
};

}  // namespace mirrorfall
