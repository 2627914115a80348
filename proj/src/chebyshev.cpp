#include "dyncp/chebyshev.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "dyncp/errors.hpp"

namespace dyncp {

namespace {

using cplx = std::complex<double>;

struct Fit {
  std::vector<cplx> coeffs;
  double tail = 0.0;
  double peak = 0.0;
};

// Coefficients from samples at the Chebyshev points of the first kind.
Fit fit_panel(const ChebyshevTable::Function& f, double a, double b, int n) {
  std::vector<cplx> values(static_cast<std::size_t>(n));
  Fit out;
  for (int k = 0; k < n; ++k) {
    const double theta = std::numbers::pi * (k + 0.5) / n;
    const double x = 0.5 * (a + b) + 0.5 * (b - a) * std::cos(theta);
    values[static_cast<std::size_t>(k)] = f(x);
    const cplx v = values[static_cast<std::size_t>(k)];
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
      throw DomainError("non-finite value while tabulating", x);
    }
    out.peak = std::max(out.peak, std::abs(v));
  }
  out.coeffs.assign(static_cast<std::size_t>(n), cplx{});
  for (int j = 0; j < n; ++j) {
    cplx s{};
    for (int k = 0; k < n; ++k) {
      s += values[static_cast<std::size_t>(k)] * std::cos(std::numbers::pi * j * (k + 0.5) / n);
    }
    out.coeffs[static_cast<std::size_t>(j)] = s * (j == 0 ? 1.0 / n : 2.0 / n);
  }
  out.tail = std::max({std::abs(out.coeffs[n - 1]), std::abs(out.coeffs[n - 2]), std::abs(out.coeffs[n - 3])});
  return out;
}

}  // namespace

ChebyshevTable::ChebyshevTable(const Function& f, std::vector<double> breakpoints, double rel_tol, int order,
                               int max_depth) {
  if (breakpoints.size() < 2 || !std::is_sorted(breakpoints.begin(), breakpoints.end())) {
    throw PreconditionError("Chebyshev table needs increasing breakpoints");
  }
  if (order < 8) throw PreconditionError("Chebyshev order must be >= 8");
  breakpoints.erase(std::unique(breakpoints.begin(), breakpoints.end()), breakpoints.end());

  struct Pending {
    double a, b;
    int depth;
    Fit fit;
  };
  std::vector<Pending> work;
  double scale = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    Fit fit = fit_panel(f, breakpoints[i], breakpoints[i + 1], order);
    scale = std::max(scale, fit.peak);
    work.push_back({breakpoints[i], breakpoints[i + 1], 0, std::move(fit)});
  }

  std::vector<std::pair<double, std::vector<cplx>>> done;
  while (!work.empty()) {
    Pending cur = std::move(work.back());
    work.pop_back();
    scale = std::max(scale, cur.fit.peak);
    if (cur.fit.tail <= rel_tol * scale) {
      done.emplace_back(cur.a, std::move(cur.fit.coeffs));
      continue;
    }
    if (cur.depth >= max_depth) {
      throw QuadratureError("Chebyshev table could not resolve a panel", cur.fit.coeffs[0], cur.fit.tail);
    }
    const double mid = 0.5 * (cur.a + cur.b);
    work.push_back({mid, cur.b, cur.depth + 1, fit_panel(f, mid, cur.b, order)});
    work.push_back({cur.a, mid, cur.depth + 1, fit_panel(f, cur.a, mid, order)});
  }
  std::sort(done.begin(), done.end(), [](const auto& l, const auto& r) { return l.first < r.first; });
  for (auto& [a, c] : done) {
    edges_.push_back(a);
    coeffs_.push_back(std::move(c));
  }
  edges_.push_back(breakpoints.back());
}

std::complex<double> ChebyshevTable::operator()(double x) const {
  if (x < edges_.front() || x > edges_.back()) throw PreconditionError("Chebyshev table queried outside its range");
  auto it = std::upper_bound(edges_.begin(), edges_.end(), x);
  std::size_t i = static_cast<std::size_t>(std::distance(edges_.begin(), it));
  i = std::min(i == 0 ? 0 : i - 1, coeffs_.size() - 1);
  const double a = edges_[i];
  const double b = edges_[i + 1];
  const double u = (2.0 * x - a - b) / (b - a);
  const auto& c = coeffs_[i];
  // Clenshaw recurrence.
  cplx b1{}, b2{};
  for (std::size_t j = c.size() - 1; j >= 1; --j) {
    const cplx tmp = 2.0 * u * b1 - b2 + c[j];
    b2 = b1;
    b1 = tmp;
  }
  return u * b1 - b2 + c[0];
}

}  // namespace dyncp
