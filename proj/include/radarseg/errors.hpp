// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace radarseg {

/// Base class for all errors raised by this library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid configuration or invalid user-supplied input.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. Carries the 1-based line number and the offending
/// field when known.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, std::size_t line, std::string field)
      : Error("line " + std::to_string(line) + ", field \"" + field + "\": " + what),
        line_(line),
        field_(std::move(field)) {}
  ParseError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const { return line_; }
  const std::string& field() const { return field_; }

 private:
  std::size_t line_ = 0;
  std::string field_;
};

/// A frame violates its structural invariants (e.g. a point references a
/// track id with no matching centroid).
class MalformedFrameError : public Error {
 public:
  using Error::Error;
};

/// Covariance factorization failed (matrix not positive definite). Carries
/// the mixture component index when the matrix belongs to one (-1 otherwise).
class SingularCovarianceError : public Error {
 public:
  explicit SingularCovarianceError(const std::string& what, int component = -1)
      : Error(what), component_(component) {}
  int component() const { return component_; }

 private:
  int component_ = -1;
};

/// A mixture component lost all of its responsibility mass.
class ComponentCollapseError : public Error {
 public:
  ComponentCollapseError(const std::string& what, int component)
      : Error(what), component_(component) {}
  int component() const { return component_; }

 private:
  int component_;
};

/// Fewer data points than the operation requires.
class InsufficientDataError : public Error {
 public:
  using Error::Error;
};

/// EM fitting gave up after exhausting recovery attempts.
class FitFailureError : public Error {
 public:
  using Error::Error;
};

class InvalidThresholdError : public Error {
 public:
  using Error::Error;
};

/// Cluster/class association requested for more components than the
/// exhaustive search supports.
class UnsupportedKError : public Error {
 public:
  using Error::Error;
};

/// Model file could not be loaded (version mismatch, corrupt parameters).
class ModelIoError : public Error {
 public:
  using Error::Error;
};

}  // namespace radarseg
