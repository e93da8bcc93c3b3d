#pragma once

#include <stdexcept>
#include <string>

namespace qfcs {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong dimensions, broken structural invariants, bad
/// scenario fields. The CLI maps these to exit status 2.
class ValidationError : public Error {
 public:
  using Error::Error;
};

/// A computation did not converge or produced a result outside its
/// guaranteed tolerance. The CLI maps these to exit status 3.
class NumericalError : public Error {
 public:
  using Error::Error;
};

}  // namespace qfcs
