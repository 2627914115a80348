#include "dyncp/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <queue>

#include "dyncp/errors.hpp"

namespace dyncp::quad {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Kronrod 21-point abscissae on [0, 1]; odd indices are the embedded 10-point Gauss nodes.
constexpr std::array<double, 11> kXgk = {
    0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
    0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
    0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
    0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
    0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
    0.000000000000000000000000000000000};

constexpr std::array<double, 11> kWgk = {
    0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
    0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
    0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
    0.123491976262065851077600541953104, 0.134709217311473325928054001771707,
    0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
    0.149445554002916905664936468389821};

constexpr std::array<double, 5> kWg = {
    0.066671344308688137593568809893332, 0.149451349150580593145776339657697,
    0.219086362515982043995534934228163, 0.269266719309996355091226921569469,
    0.295524224714752870173892994651338};

constexpr double kEps = std::numeric_limits<double>::epsilon();

struct Panel {
  double a = 0.0;
  double b = 0.0;
  cplx value{};
  double error = 0.0;
  bool operator<(const Panel& other) const { return error < other.error; }
};

cplx checked(const Integrand& f, double x) {
  const cplx v = f(x);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) {
    throw DomainError("non-finite integrand value", x);
  }
  return v;
}

// One application of the 21-point rule with the QUADPACK error heuristic.
Panel gk21(const Integrand& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  std::array<cplx, 21> fv{};
  fv[0] = checked(f, center);
  for (std::size_t j = 0; j < 10; ++j) {
    const double dx = half * kXgk[j];
    fv[1 + 2 * j] = checked(f, center - dx);
    fv[2 + 2 * j] = checked(f, center + dx);
  }
  cplx kronrod = fv[0] * kWgk[10];
  cplx gauss{};
  double abs_sum = std::abs(fv[0]) * kWgk[10];
  for (std::size_t j = 0; j < 10; ++j) {
    const cplx pair = fv[1 + 2 * j] + fv[2 + 2 * j];
    kronrod += kWgk[j] * pair;
    abs_sum += kWgk[j] * (std::abs(fv[1 + 2 * j]) + std::abs(fv[2 + 2 * j]));
    if (j % 2 == 1) gauss += kWg[j / 2] * pair;
  }
  const cplx mean = 0.5 * kronrod;
  double asc = std::abs(fv[0] - mean) * kWgk[10];
  for (std::size_t j = 0; j < 10; ++j) {
    asc += kWgk[j] * (std::abs(fv[1 + 2 * j] - mean) + std::abs(fv[2 + 2 * j] - mean));
  }
  const double scale = std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  const double resasc = asc * scale;
  const double resabs = abs_sum * scale;
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  if (resabs > std::numeric_limits<double>::min() / (50.0 * kEps)) {
    err = std::max(50.0 * kEps * resabs, err);
  }
  return {a, b, kronrod * half, err};
}

double target(const Spec& spec, cplx total) {
  return std::max(spec.abs_tol, spec.rel_tol * std::abs(total));
}

}  // namespace

void Spec::validate() const {
  if (!(rel_tol > 0.0 && rel_tol <= 1e-3)) {
    throw PreconditionError("quadrature rel_tol must lie in (0, 1e-3]");
  }
  if (abs_tol < 0.0) throw PreconditionError("quadrature abs_tol must be >= 0");
  if (max_subdivisions < 16) throw PreconditionError("quadrature max_subdivisions must be >= 16");
}

Result& Result::operator+=(const Result& other) {
  value += other.value;
  error_bound += other.error_bound;
  evaluations += other.evaluations;
  converged = converged && other.converged;
  return *this;
}

Result integrate(const Integrand& f, const std::vector<double>& breakpoints, const Spec& spec) {
  spec.validate();
  if (breakpoints.size() < 2) throw PreconditionError("need at least two breakpoints");

  std::priority_queue<Panel> heap;
  Result out;
  out.converged = true;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] == breakpoints[i]) continue;
    Panel p = gk21(f, breakpoints[i], breakpoints[i + 1]);
    out.evaluations += 21;
    out.value += p.value;
    out.error_bound += p.error;
    heap.push(p);
  }

  // Panels that cannot be split further stay in the tally but leave the heap.
  double frozen_error = 0.0;
  cplx frozen_value = 0.0;
  int subdivisions = static_cast<int>(heap.size());
  while (!heap.empty() && out.error_bound > target(spec, out.value)) {
    if (subdivisions >= spec.max_subdivisions) {
      out.converged = false;
      break;
    }
    Panel worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (std::abs(worst.b - worst.a) <= 100.0 * kEps * std::max(std::abs(worst.a), std::abs(worst.b)) ||
        mid == worst.a || mid == worst.b) {
      frozen_error += worst.error;
      frozen_value += worst.value;
      continue;
    }
    const Panel left = gk21(f, worst.a, mid);
    const Panel right = gk21(f, mid, worst.b);
    out.evaluations += 42;
    ++subdivisions;
    out.value += left.value + right.value - worst.value;
    out.error_bound += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }

  // Re-sum to shed accumulated cancellation in the running totals.
  cplx value = frozen_value;
  double error = frozen_error;
  while (!heap.empty()) {
    value += heap.top().value;
    error += heap.top().error;
    heap.pop();
  }
  out.value = value;
  out.error_bound = error;
  if (out.error_bound > target(spec, out.value)) out.converged = false;
  return out;
}

Result integrate(const Integrand& f, double a, double b, const Spec& spec) {
  return integrate(f, std::vector<double>{a, b}, spec);
}

Result integrate_semi_infinite(const Integrand& f, double a, const Spec& spec) {
  spec.validate();
  const Transform& tr = spec.transform;
  if (tr.kind == Transform::Kind::LogCompress) {
    const double scale = 1.0 / tr.rate;
    Result out;
    out.converged = true;
    int quiet = 0;
    cplx previous = 0.0;
    for (int k = 0; k < 200; ++k) {
      const double lo = a + scale * (std::ldexp(1.0, k) - 1.0);
      const double hi = a + scale * (std::ldexp(1.0, k + 1) - 1.0);
      const Result panel = integrate(f, lo, hi, spec);
      out += panel;
      // Remaining tail extrapolated from the geometric ratio of successive panels.
      const cplx ratio = k > 0 && previous != 0.0 ? panel.value / previous : cplx(1.0);
      previous = panel.value;
      const cplx tail = std::abs(ratio) < 0.9 ? panel.value * ratio / (1.0 - ratio) : cplx(kInf);
      if (std::abs(tail) <= 0.5 * target(spec, out.value)) {
        if (++quiet >= 3) {
          out.value += tail;
          out.error_bound += std::abs(tail);
          return out;
        }
      } else {
        quiet = 0;
      }
    }
    out.converged = false;
    return out;
  }

  const double scale = tr.kind == Transform::Kind::ExpWeighted ? 1.0 / tr.rate : 1.0;
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw PreconditionError("exp-weighted transform needs a positive finite rate");
  }
  const Integrand mapped = [&](double u) -> cplx {
    const double one_minus = 1.0 - u;
    const double x = a + scale * u / one_minus;
    if (!std::isfinite(x) || x > 1e300) return 0.0;
    return f(x) * (scale / (one_minus * one_minus));
  };
  return integrate(mapped, 0.0, 1.0, spec);
}

cplx euler_average(std::vector<cplx> sums) {
  if (sums.empty()) return 0.0;
  while (sums.size() > 1) {
    for (std::size_t i = 0; i + 1 < sums.size(); ++i) sums[i] = 0.5 * (sums[i] + sums[i + 1]);
    sums.pop_back();
  }
  return sums.front();
}

Result integrate_oscillatory(const Integrand& f, double a, double first_zero, double phase_rate,
                             const Spec& spec, std::vector<cplx>* partial_sums) {
  spec.validate();
  if (!(phase_rate > 0.0)) throw PreconditionError("phase_rate must be positive");
  if (first_zero < a) throw PreconditionError("first_zero must not precede a");

  Result head;
  head.converged = true;
  if (first_zero > a) head = integrate(f, a, first_zero, spec);

  const double spacing = M_PI / phase_rate;
  constexpr int kMinSegments = 24;
  constexpr int kStep = 8;
  constexpr int kMaxSegments = 400;

  std::vector<cplx> sums;
  Result segments;
  segments.converged = true;
  cplx running = 0.0;
  cplx previous{};
  bool have_previous = false;
  double change = std::numeric_limits<double>::infinity();
  bool accelerated = false;
  for (int n = 0; n < kMaxSegments; ++n) {
    const double lo = first_zero + n * spacing;
    const Result seg = integrate(f, lo, lo + spacing, spec);
    segments.error_bound += seg.error_bound;
    segments.evaluations += seg.evaluations;
    segments.converged = segments.converged && seg.converged;
    running += seg.value;
    sums.push_back(running);
    const int count = n + 1;
    if (count >= kMinSegments && (count - kMinSegments) % kStep == 0) {
      const cplx estimate = euler_average(sums);
      if (have_previous) {
        change = std::abs(estimate - previous);
        if (change <= target(spec, head.value + estimate)) {
          previous = estimate;
          accelerated = true;
          break;
        }
      }
      previous = estimate;
      have_previous = true;
    }
  }
  if (partial_sums != nullptr) *partial_sums = sums;

  Result out = head;
  out.value += previous;
  out.error_bound += segments.error_bound + (std::isfinite(change) ? change : std::abs(previous));
  out.evaluations += segments.evaluations;
  out.converged = head.converged && segments.converged && accelerated;
  return out;
}

Result integrate_oscillatory(const Integrand& f, double phase_rate, const Spec& spec) {
  return integrate_oscillatory(f, 0.0, 0.0, phase_rate, spec);
}

RootResult refine_root(const ComplexFunction& f, const std::optional<ComplexFunction>& df,
                       cplx seed, const RootSpec& spec) {
  cplx x = seed;
  cplx fx = f(x);
  // Secant memory; the first secant step uses a small perturbation of the seed.
  cplx x_prev = seed * (1.0 + 1e-7) + cplx(1e-9, 0.0);
  cplx f_prev = f(x_prev);
  for (int it = 0; it <= spec.max_iterations; ++it) {
    if (!std::isfinite(x.real()) || !std::isfinite(x.imag()) || std::abs(x) > 1e12) {
      throw RootError("root iteration diverged", x);
    }
    if (std::abs(fx) < spec.abs_tol) return {x, it};
    if (it == spec.max_iterations) break;

    cplx step{};
    bool have_step = false;
    if (df) {
      const cplx d = (*df)(x);
      if (std::abs(d) > 0.0 && std::isfinite(std::abs(d))) {
        step = fx / d;
        have_step = true;
      }
    }
    if (!have_step) {
      const cplx slope = (fx - f_prev) / (x - x_prev);
      if (!(std::abs(slope) > 0.0)) throw RootError("flat secant slope", x);
      step = fx / slope;
    }
    x_prev = x;
    f_prev = fx;
    x -= step;
    fx = f(x);
  }
  throw RootError("root iteration cap reached", x);
}

}  // namespace dyncp::quad
