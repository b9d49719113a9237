#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace maximin {

/// Base for everything the library throws.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed call: dimension mismatch, bad label, empty input and so on.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// The kernel matrix could not be factorized within the jitter budget.
class ConditioningError : public Error {
 public:
  ConditioningError(const std::string& what, double condition_estimate)
      : Error(what), condition_estimate_(condition_estimate) {}

  /// Reciprocal-condition based estimate of cond(K); +inf when unknown.
  double condition_estimate() const noexcept { return condition_estimate_; }

 private:
  double condition_estimate_;
};

/// A candidate coincides (numerically) with an already labeled point.
class DuplicatePointError : public Error {
 public:
  using Error::Error;
};

class EmptyPoolError : public Error {
 public:
  using Error::Error;
};

/// Spline candidate outside the knot range.
class OutOfRangeError : public Error {
 public:
  using Error::Error;
};

/// Invalid experiment or cluster specification.
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// CSV dataset violates the ingestion schema; carries the 1-based line.
class IngestionError : public Error {
 public:
  IngestionError(const std::string& what, std::size_t line)
      : Error("line " + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

}  // namespace maximin
