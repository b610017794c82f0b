#pragma once

#include <stdexcept>
#include <string>

namespace blocknys {

// All library errors derive from Error so callers can catch one type.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

// A structural parameter is out of range (bad spectrum, negative regularizer, ...).
class InvalidSpecError : public Error {
 public:
  using Error::Error;
};

// A dense materialization or dense oracle was requested above the desk-scale cap.
class TooLargeError : public Error {
 public:
  using Error::Error;
};

// The reference side of a generalized eigenvalue comparison is numerically singular.
class SingularReferenceError : public Error {
 public:
  using Error::Error;
};

class DimensionMismatchError : public Error {
 public:
  using Error::Error;
};

// An inner linear system is singular beyond the pseudo-inverse tolerance.
class InnerSingularityError : public Error {
 public:
  using Error::Error;
};

// A randomized embedding produced an unusable (singular) sketch after retries.
class EmbeddingFailureError : public Error {
 public:
  using Error::Error;
};

// A kernel evaluation exceeded its declared bound.
class KernelBoundError : public Error {
 public:
  using Error::Error;
};

// A quadratic objective's Hessian is not positive definite.
class NotStronglyConvexError : public Error {
 public:
  using Error::Error;
};

// An iterative solver hit its iteration cap or stopped making progress.
class ConvergenceError : public Error {
 public:
  using Error::Error;
};

class IoError : public Error {
 public:
  using Error::Error;
};

}  // namespace blocknys
