#pragma once

#include <complex>
#include <functional>
#include <vector>

namespace dyncp {

/// Piecewise Chebyshev interpolant of a smooth complex function on [a, b], refined by bisection
/// until the trailing coefficients of every panel fall below abs_tol. Immutable once built.
class ChebyshevTable {
 public:
  using Function = std::function<std::complex<double>(double)>;

  /// `breakpoints` must be increasing; panels never straddle them. Throws QuadratureError when a
  /// panel cannot be resolved within max_depth bisections.
  ChebyshevTable(const Function& f, std::vector<double> breakpoints, double rel_tol, int order = 24,
                 int max_depth = 40);

  std::complex<double> operator()(double x) const;
  double lower() const { return edges_.front(); }
  double upper() const { return edges_.back(); }
  const std::vector<double>& edges() const { return edges_; }
  std::size_t panels() const { return coeffs_.size(); }

 private:
  std::vector<double> edges_;
  std::vector<std::vector<std::complex<double>>> coeffs_;
};

}  // namespace dyncp
