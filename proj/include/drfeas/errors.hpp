#pragma once

#include <stdexcept>
#include <string>

namespace drfeas {

/// Base of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bad arguments: dimension mismatch, violated set invariant, malformed config.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// A numerical procedure could not produce a result.
class NumericalError : public Error {
 public:
  using Error::Error;
};

/// No sign change on the supplied (or expanded) bracket.
class BracketError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

/// Too few usable residuals, or residuals that do not decay.
class FitError : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

}  // namespace drfeas
