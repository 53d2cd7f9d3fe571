#pragma once

#include <stdexcept>
#include <string>

namespace rforge {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A caller-supplied argument is outside the documented domain.
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Input data failed validation (wrong shape, non-finite entries, ...).
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// An invariant that the construction guarantees in exact arithmetic failed
/// numerically. Carries enough context to reproduce.
class InvariantViolation : public Error {
 public:
  using Error::Error;
};

/// The iterative eigensolver hit its iteration cap.
class ConvergenceError : public Error {
 public:
  ConvergenceError(const std::string& what, long order, double residual)
      : Error(what), order_(order), residual_(residual) {}
  long order() const noexcept { return order_; }
  double residual() const noexcept { return residual_; }

 private:
  long order_;
  double residual_;
};

/// Cholesky factorization met a nonpositive pivot.
class FactorizationError : public Error {
 public:
  FactorizationError(const std::string& what, double smallest_pivot)
      : Error(what), smallest_pivot_(smallest_pivot) {}
  double smallest_pivot() const noexcept { return smallest_pivot_; }

 private:
  double smallest_pivot_;
};

/// Rank-one update whose denominator 1 + <M^{-1}z, z> vanishes.
class SingularUpdateError : public Error {
 public:
  using Error::Error;
};

/// An independent verifier rejected a result.
class CertificationFailure : public Error {
 public:
  using Error::Error;
};

/// Malformed input file. line() is 1-based, 0 when not attributable.
class ParseError : public Error {
 public:
  ParseError(const std::string& what, long line)
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line_(line) {}
  long line() const noexcept { return line_; }

 private:
  long line_;
};

}  // namespace rforge
