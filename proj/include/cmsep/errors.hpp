#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace cmsep {

/// Base class of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Collinear or zero periods.
class LatticeDegenerateError : public Error {
 public:
  using Error::Error;
};

/// Evaluation point closer to a pole than the exclusion radius.
class PoleError : public Error {
 public:
  using Error::Error;
};

/// A value is not representable in binary64 after exponentiation.
/// The logarithm that overflowed is kept so callers can keep working in log space.
class RangeError : public Error {
 public:
  RangeError(const std::string& what, std::complex<double> log_value)
      : Error(what), log_value_(log_value) {}
  std::complex<double> log_value() const noexcept { return log_value_; }

 private:
  std::complex<double> log_value_;
};

/// Ansatz parameters violate the distinctness assumptions.
class DegeneracyError : public Error {
 public:
  using Error::Error;
};

/// A Laurent contour touches a singularity or produced non-finite samples.
class ContourError : public Error {
 public:
  using Error::Error;
};

/// Malformed user input (configuration files, complex literals, grid specs).
class InputError : public Error {
 public:
  using Error::Error;
};

}  // namespace cmsep
