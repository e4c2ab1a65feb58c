#pragma once

#include <stdexcept>
#include <string>

namespace gasrom {

// Failure categories. The numeric value doubles as the CLI exit code.
enum class ErrorKind : int {
  Config = 2,
  Solver = 3,
  Fit = 4,
  Rollout = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// Shapes or sizes that do not line up.
class DimensionError : public Error {
 public:
  explicit DimensionError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

/// Non-finite or otherwise unusable numeric input.
class DataError : public Error {
 public:
  explicit DataError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

/// Argument outside its mathematical domain (e.g. non-positive viscosity).
class DomainError : public Error {
 public:
  explicit DomainError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

/// Malformed container files: bad magic, truncation, schema mismatch.
class FormatError : public Error {
 public:
  explicit FormatError(const std::string& what) : Error(ErrorKind::Config, what) {}
};

/// Requested time step exceeds the explicit-scheme limit.
class StabilityError : public Error {
 public:
  explicit StabilityError(const std::string& what) : Error(ErrorKind::Solver, what) {}
};

/// Solver state became non-finite or non-positive.
class DivergenceError : public Error {
 public:
  explicit DivergenceError(const std::string& what) : Error(ErrorKind::Solver, what) {}
};

/// Zero-variance snapshot data.
class DegenerateDataError : public Error {
 public:
  explicit DegenerateDataError(const std::string& what) : Error(ErrorKind::Fit, what) {}
};

class FitError : public Error {
 public:
  explicit FitError(const std::string& what) : Error(ErrorKind::Fit, what) {}
};

/// A reduced-model rollout produced a non-finite state.
class RolloutDivergenceError : public Error {
 public:
  RolloutDivergenceError(const std::string& what, long step)
      : Error(ErrorKind::Rollout, what), step_(step) {}
  long step() const noexcept { return step_; }

 private:
  long step_;
};

}  // namespace gasrom
