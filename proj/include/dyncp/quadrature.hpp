#pragma once

#include <complex>
#include <functional>
#include <optional>
#include <vector>

namespace dyncp::quad {

using cplx = std::complex<double>;
using Integrand = std::function<cplx(double)>;

/// Variable change applied to the half line [a, inf) before adaptive integration.
struct Transform {
  enum class Kind {
    None,         // x = a + u/(1-u)
    ExpWeighted,  // x = a + u/(rate (1-u)), matched to an e^{-rate x} decay
    LogCompress,  // geometric panels [a + L(2^k - 1), a + L(2^{k+1} - 1)], for algebraic tails
  };
  Kind kind = Kind::None;
  double rate = 1.0;

  static Transform none() { return {}; }
  static Transform exp_weighted(double rate) { return {Kind::ExpWeighted, rate}; }
  static Transform log_compress(double scale = 1.0) { return {Kind::LogCompress, 1.0 / scale}; }
};

struct Spec {
  double rel_tol = 1e-9;
  double abs_tol = 0.0;
  int max_subdivisions = 2000;
  Transform transform{};

  /// Throws PreconditionError unless rel_tol in (0, 1e-3] and max_subdivisions >= 16.
  void validate() const;
};

struct Result {
  cplx value{};
  double error_bound = 0.0;
  long evaluations = 0;
  bool converged = false;

  Result& operator+=(const Result& other);
};

/// Globally adaptive Gauss-Kronrod (10/21) integration over [a, b].
Result integrate(const Integrand& f, double a, double b, const Spec& spec);

/// Same as integrate() with breakpoints; the pieces share the tolerance budget.
Result integrate(const Integrand& f, const std::vector<double>& breakpoints, const Spec& spec);

/// Integral over [a, inf) using the variable change selected by spec.transform.
Result integrate_semi_infinite(const Integrand& f, double a, const Spec& spec);

/// Integral over [a, inf) of an integrand oscillating with zeros spaced pi/phase_rate apart,
/// starting at first_zero (>= a). Segments between zeros are integrated adaptively and the
/// partial sums are accelerated by repeated averaging (Euler transform).
///
/// `partial_sums`, when given, receives the raw segment partial sums.
Result integrate_oscillatory(const Integrand& f, double a, double first_zero, double phase_rate,
                             const Spec& spec, std::vector<cplx>* partial_sums = nullptr);

/// Convenience overload: a = first_zero = 0.
Result integrate_oscillatory(const Integrand& f, double phase_rate, const Spec& spec);

/// Euler transform of a sequence of partial sums by repeated pairwise averaging.
cplx euler_average(std::vector<cplx> partial_sums);

struct RootSpec {
  double abs_tol = 1e-10;
  int max_iterations = 100;
};

struct RootResult {
  cplx root{};
  int iterations = 0;
};

using ComplexFunction = std::function<cplx(cplx)>;

/// Newton iteration on an analytic function; falls back to secant steps when no derivative
/// is supplied or the derivative vanishes. Converged when |f| < spec.abs_tol.
/// Throws RootError when the iteration cap is hit or the iterate stops being finite.
RootResult refine_root(const ComplexFunction& f, const std::optional<ComplexFunction>& df,
                       cplx seed, const RootSpec& spec = {});

}  // namespace dyncp::quad
