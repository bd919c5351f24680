#pragma once

#include <stdexcept>
#include <string>

namespace skcap {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Tensor dimensions or alphabet sizes do not agree.
class ShapeError : public Error {
 public:
  using Error::Error;
};

/// A probability object failed validation (negative mass, bad normalization).
class ProbabilityError : public Error {
 public:
  using Error::Error;
};

/// An argument lies outside the domain where a formula is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// An enumeration or codebook would exceed its configured budget.
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Malformed user input (channel files, CLI arguments).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace skcap
