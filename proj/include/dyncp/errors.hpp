#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace dyncp {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model was asked for something it does not define (e.g. epsilon of a perfect reflector).
class UnsupportedOperation : public Error {
 public:
  using Error::Error;
};

/// A caller violated an operation precondition (z <= 0, t < 0, ...).
class PreconditionError : public Error {
 public:
  using Error::Error;
};

/// Evaluation at a pole of a response function.
class PoleError : public Error {
 public:
  PoleError(const std::string& what, std::complex<double> omega, double p = 0.0)
      : Error(what), omega_(omega), p_(p) {}
  std::complex<double> omega() const { return omega_; }
  double p() const { return p_; }

 private:
  std::complex<double> omega_;
  double p_;
};

/// The integrand returned a non-finite value.
class DomainError : public Error {
 public:
  DomainError(const std::string& what, double abscissa)
      : Error(what), abscissa_(abscissa) {}
  double abscissa() const { return abscissa_; }

 private:
  double abscissa_;
};

/// Adaptive integration did not reach the requested tolerance.
class QuadratureError : public Error {
 public:
  QuadratureError(const std::string& what, std::complex<double> estimate, double error_bound)
      : Error(what), estimate_(estimate), error_bound_(error_bound) {}
  std::complex<double> estimate() const { return estimate_; }
  double error_bound() const { return error_bound_; }

 private:
  std::complex<double> estimate_;
  double error_bound_;
};

/// Root refinement failed to converge.
class RootError : public Error {
 public:
  RootError(const std::string& what, std::complex<double> last_iterate)
      : Error(what), last_iterate_(last_iterate) {}
  std::complex<double> last_iterate() const { return last_iterate_; }

 private:
  std::complex<double> last_iterate_;
};

/// A dispersion root left the quadrant it is expected to live in.
class BranchError : public Error {
 public:
  BranchError(const std::string& what, std::complex<double> root)
      : Error(what), root_(root) {}
  std::complex<double> root() const { return root_; }

 private:
  std::complex<double> root_;
};

/// Envelope extraction or curve fitting failed (non-monotone envelope, too few extrema).
class FitError : public Error {
 public:
  using Error::Error;
};

}  // namespace dyncp
