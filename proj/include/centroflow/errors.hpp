#pragma once

#include <stdexcept>
#include <string>

namespace centroflow {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid argument or precondition (unsupported dimension, size mismatch, ...).
class InvalidArgument : public Error {
 public:
  using Error::Error;
};

/// A radius of curvature fell to or below the convexity floor.
class ConvexityViolation : public Error {
 public:
  ConvexityViolation(const std::string& what, double min_radius, std::size_t node)
      : Error(what), min_radius_(min_radius), node_(node) {}
  double min_radius() const noexcept { return min_radius_; }
  std::size_t node() const noexcept { return node_; }

 private:
  double min_radius_;
  std::size_t node_;
};

/// The time stepper gave up after too many consecutive rejections.
class StepFailure : public Error {
 public:
  using Error::Error;
};

/// Requested time is at or past the extinction time of a ball.
class Extinct : public Error {
 public:
  using Error::Error;
};

/// Boundary samples (nearly) lie in a hyperplane.
class DegenerateSpan : public Error {
 public:
  using Error::Error;
};

/// Random shape generation could not find a convex body.
class RejectionExhausted : public Error {
 public:
  using Error::Error;
};

/// Malformed or inconsistent run configuration.
class ConfigError : public Error {
 public:
  using Error::Error;
};

}  // namespace centroflow
