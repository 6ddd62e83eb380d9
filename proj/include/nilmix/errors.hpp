#pragma once

#include <stdexcept>
#include <string>

namespace nilmix {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Malformed input: wrong dimensions, invalid matrices, bad configuration.
class InvalidInput : public Error {
 public:
  using Error::Error;
};

/// The input is well formed but outside the implemented scope
/// (e.g. a non-semisimple action).
class UnsupportedInput : public Error {
 public:
  using Error::Error;
};

/// Certified arithmetic could not reach the requested accuracy within the
/// precision cap.
class PrecisionExhausted : public Error {
 public:
  using Error::Error;
};

/// An enumeration or sampling budget was exceeded.
class BudgetExceeded : public Error {
 public:
  using Error::Error;
};

/// An exact identity that the instance must avoid holds (e.g. a product of
/// units equal to one).
class DegenerateInstance : public Error {
 public:
  using Error::Error;
};

/// A certificate could not be decided either way.
class Undecided : public Error {
 public:
  using Error::Error;
};

/// A measurement contradicts a theorem the library checks.
class Falsification : public Error {
 public:
  using Error::Error;
};

}  // namespace nilmix
