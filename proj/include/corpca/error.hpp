#pragma once

#include <stdexcept>
#include <string>

namespace corpca {

/// Base class of every error thrown by the toolkit.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Dimension mismatch, non-finite data or a violated type invariant.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// An iterative solver produced a non-finite iterate.
class DivergenceError : public Error {
 public:
  DivergenceError(const std::string& what, int iteration)
      : Error(what + " (iteration " + std::to_string(iteration) + ")"), iteration_(iteration) {}

  int iteration() const noexcept { return iteration_; }

 private:
  int iteration_;
};

/// Arguments outside the domain of a closed-form expression.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Malformed file header or body.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long long offset)
      : Error(what + " at byte " + std::to_string(offset)), offset_(offset) {}

  long long offset() const noexcept { return offset_; }

 private:
  long long offset_;
};

/// Well-formed files that are inconsistent with each other.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace corpca
