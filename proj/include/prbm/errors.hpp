#pragma once

#include <stdexcept>
#include <string>

namespace prbm {

/// Base for failures raised by the numerical layers (as opposed to caller
/// mistakes, which are std::invalid_argument).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Snapshot residual below the drop tolerance; the snapshot was not added.
class DegenerateSnapshot : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Projection system is singular or rank deficient.
class DegenerateBasis : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Trajectory state became non-finite.
class NumericalBlowup : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Selector needs data the error sampler does not provide.
class UnsupportedSelector : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Configuration rejected; the message names the offending field.
class ConfigError : public std::invalid_argument {
 public:
  ConfigError(const std::string& field, const std::string& what)
      : std::invalid_argument(field + ": " + what), field_(field) {}
  [[nodiscard]] const std::string& field() const { return field_; }

 private:
  std::string field_;
};

}  // namespace prbm
