#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mshjb {

/// Base class for all toolkit errors.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Model document failed schema or structural validation.
/// Carries the full list of violations, each tagged with a reaction index
/// where applicable.
class ParseError : public Error {
 public:
  explicit ParseError(std::vector<std::string> violations)
      : Error(join(violations)), violations_(std::move(violations)) {}
  const std::vector<std::string>& violations() const { return violations_; }

 private:
  static std::string join(const std::vector<std::string>& v) {
    std::string s = "model validation failed:";
    for (const auto& m : v) s += "\n  - " + m;
    return s;
  }
  std::vector<std::string> violations_;
};

/// Enumeration would exceed a configured size cap.
class CapacityError : public Error {
 public:
  using Error::Error;
};

/// A tilt exponent left the representable floating-point range.
class OverflowError : public Error {
 public:
  using Error::Error;
};

/// An iterative solve did not reach its tolerance within the iteration cap.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

/// The tilted operator could not be paired into a left/right principal
/// eigenvector pair (disconnected positivity graph with tied blocks).
class ReducibleError : public Error {
 public:
  using Error::Error;
};

/// A measure with zero mass on some fast state was passed where full
/// support is required (the Donsker-Varadhan infimum may be -inf there).
class DegenerateSupportError : public Error {
 public:
  using Error::Error;
};

/// Invalid configuration (non-positive lambda, mismatched grids, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace mshjb
