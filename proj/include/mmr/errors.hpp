#pragma once

#include <stdexcept>
#include <string>

namespace mmr {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Input that could not be read or tokenized.
class ParseError : public Error {
 public:
  using Error::Error;
};

/// Input that parsed but violates a domain invariant.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// Base for failures of the numerical machinery (as opposed to bad input).
class NumericalError : public Error {
 public:
  using Error::Error;
};

class DivergentIntegral : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class NonConvergence : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Discount rate for which the infinite-horizon problem has no solution.
class InvalidDiscount : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class ResonantForcing : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Cumulative emissions have no interior maximum on the search horizon.
/// Carries the temperature approached as t -> infinity.
class NoPeak : public NumericalError {
 public:
  NoPeak(const std::string& what, double asymptote)
      : NumericalError(what), asymptote_(asymptote) {}

  double asymptote() const noexcept { return asymptote_; }

 private:
  double asymptote_;
};

}  // namespace mmr
