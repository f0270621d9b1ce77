#pragma once

#include <stdexcept>
#include <string>

namespace ncm {

/// Base class for every domain error raised by the library. Malformed input
/// (wrong shapes, out-of-range indices) uses std::invalid_argument instead.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A moment coefficient vanishes, so the moment cannot be divided out.
class ZeroCoefficientError : public Error {
 public:
  using Error::Error;
};

/// An extrapolation did not settle below its residual tolerance.
class NonConvergenceError : public Error {
 public:
  using Error::Error;
};

/// A radius is outside the region where the |S_z|^p series converges.
class InadmissibleRadiusError : public Error {
 public:
  using Error::Error;
};

/// An enumeration would exceed its size guard.
class GuardExceededError : public Error {
 public:
  using Error::Error;
};

class ProductOutsideSpanError : public Error {
 public:
  using Error::Error;
};

class AdjointOutsideSpanError : public Error {
 public:
  using Error::Error;
};

/// lambda_N of the psi series is zero for the requested order.
class LambdaZeroError : public Error {
 public:
  using Error::Error;
};

/// A check's precondition does not hold; `detail` names the violating item.
class PreconditionFailedError : public Error {
 public:
  PreconditionFailedError(const std::string& what, std::string detail)
      : Error(what), detail_(std::move(detail)) {}
  const std::string& detail() const noexcept { return detail_; }

 private:
  std::string detail_;
};

}  // namespace ncm
