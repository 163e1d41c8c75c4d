#pragma once

#include <stdexcept>
#include <string>

namespace sospopt {

/// A non-finite value was produced during a numeric computation. Carries
/// enough context (iterate or sample index) to locate the failure.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& msg) : std::runtime_error(msg) {}
};

/// An operation was requested that the object cannot provide (e.g. a dense
/// Hessian from an objective that only supplies gradients).
class CapabilityError : public std::logic_error {
 public:
  explicit CapabilityError(const std::string& msg) : std::logic_error(msg) {}
};

/// A computation could not reach its documented accuracy target.
class PrecisionError : public std::runtime_error {
 public:
  explicit PrecisionError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace sospopt
