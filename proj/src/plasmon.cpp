#include "dyncp/plasmon.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dyncp/errors.hpp"
#include "dyncp/quadrature.hpp"

namespace dyncp {

namespace {

void require_drude(const SurfaceModel& model) {
  if (!model.is_drude()) throw UnsupportedOperation("surface plasmons need a Drude surface");
}

void require_momentum(double p) {
  if (!(p >= 0.0) || !std::isfinite(p)) throw PreconditionError("momentum p must be finite and >= 0");
}

// Principal roots with Re >= 0 for both propagation constants (off the real axis the branch is
// unambiguous).
cplx root_re_pos(cplx q) {
  cplx r = std::sqrt(q);
  return r.real() < 0.0 ? -r : r;
}

struct Terms {
  cplx eps, k, km;
};

Terms terms(const SurfaceModel& model, cplx omega, double p) {
  return {epsilon(model, omega), root_re_pos(p * p - omega * omega),
          root_re_pos(p * p - omega * omega + bulk_shift(model, omega))};
}

cplx eps_derivative(const SurfaceModel& model, cplx omega) {
  const double wp = model.plasma_frequency();
  const cplx wg = omega + cplx(0.0, model.damping_rate());
  return wp * wp * (2.0 * omega + cplx(0.0, model.damping_rate())) / (omega * omega * wg * wg);
}

}  // namespace

PlasmonMode dispersion_lossless(const SurfaceModel& model, double p) {
  require_drude(model);
  require_momentum(p);
  const double ws = model.surface_plasmon_frequency();
  const double ws2 = ws * ws;
  const double root = std::hypot(ws2, p * p);
  // Rationalized forms of ws^2 + p^2 - root and root - ws^2; no cancellation at small p.
  PlasmonMode m;
  m.p = p;
  m.omega_bar = -ws * p * std::sqrt(2.0 / (ws2 + p * p + root));
  m.kappa_bar = p * p / std::sqrt(root + ws2);
  return m;
}

cplx dispersion_residual(const SurfaceModel& model, cplx omega, double p) {
  require_drude(model);
  const Terms t = terms(model, omega, p);
  return t.eps * t.k + t.km;
}

cplx dispersion_residual_derivative(const SurfaceModel& model, cplx omega, double p) {
  require_drude(model);
  const Terms t = terms(model, omega, p);
  const cplx de = eps_derivative(model, omega);
  const cplx dk = -omega / t.k;
  const cplx dkm = -(de * omega * omega + 2.0 * t.eps * omega) / (2.0 * t.km);
  return de * t.k + t.eps * dk + dkm;
}

cplx residue_rp(const SurfaceModel& model, cplx omega, double p) {
  require_drude(model);
  // On the dispersion shell k^2 = -p^2 / eps and k_m = -eps k; both forms avoid the
  // cancellation in p^2 - w^2 near the light line.
  const cplx eps = epsilon(model, omega);
  const cplx k = root_re_pos(-p * p / eps);
  const cplx de = eps_derivative(model, omega);
  const cplx d = de * k - eps * omega / k + (de * omega * omega + 2.0 * eps * omega) / (2.0 * eps * k);
  const double scale = 2.0 * std::abs(eps * k);
  if (!(std::abs(d) > 1e-13 * scale / std::max(std::abs(omega), 1e-300))) {
    throw PoleError("degenerate plasmon pole: vanishing derivative", omega, p);
  }
  return 2.0 * eps * k / d;
}

PlasmonMode dispersion_lossy(const SurfaceModel& model, double p, std::optional<cplx> seed) {
  require_drude(model);
  require_momentum(p);
  if (!(model.damping_rate() > 0.0)) {
    throw PreconditionError("dispersion_lossy needs gamma > 0; use dispersion_lossless");
  }
  if (p == 0.0) throw PreconditionError("dispersion_lossy needs p > 0");
  const cplx start = seed.value_or(dispersion_lossless(model, p).omega_bar -
                                   cplx(0.0, 0.5 * model.damping_rate() * std::min(1.0, p)));
  // Squared form (eps + 1) p^2 = eps w^2 times w (w + i gamma): a quartic without branch points.
  const double wp2 = model.plasma_frequency() * model.plasma_frequency();
  const cplx ig(0.0, model.damping_rate());
  const auto f = [&](cplx w) {
    const cplx s = w * (w + ig);
    return (2.0 * s - wp2) * p * p - (s - wp2) * w * w;
  };
  const quad::ComplexFunction df = [&](cplx w) {
    const cplx s = w * (w + ig);
    const cplx ds = 2.0 * w + ig;
    return 2.0 * ds * p * p - ds * w * w - 2.0 * (s - wp2) * w;
  };
  quad::RootSpec spec;
  spec.abs_tol = 1e-13 * wp2 * p * p;
  const quad::RootResult r = quad::refine_root(f, df, start, spec);
  cplx w = r.root;
  const cplx d = df(w);
  if (std::abs(d) > 0.0) w -= f(w) / d;
  if (!(w.real() < 0.0) || w.imag() > 1e-12 * std::abs(w)) {
    throw BranchError("plasmon root left the quadrant Re w < 0, Im w <= 0", w);
  }
  // The squared form also admits eps k = k_m; keep only roots of the bound-mode sheet.
  const cplx eps = epsilon(model, w);
  const cplx k_shell = root_re_pos(-p * p / eps);
  const cplx km = root_re_pos(p * p - w * w + bulk_shift(model, w));
  if (std::abs(eps * k_shell + km) > 1e-6 * (std::abs(eps * k_shell) + std::abs(km))) {
    throw BranchError("plasmon root is not on the bound-mode sheet", w);
  }
  PlasmonMode m;
  m.p = p;
  m.omega_bar = w;
  m.kappa_bar = k_shell;
  m.residue = residue_rp(model, w, p);
  m.iterations = r.iterations;
  return m;
}

cplx near_field_pole(const SurfaceModel& model) {
  require_drude(model);
  return {-model.surface_plasmon_frequency(), -0.5 * model.damping_rate()};
}

PlasmonBranch::PlasmonBranch(const SurfaceModel& model, double p_max, int points) : model_(model) {
  require_drude(model);
  if (!(p_max > 0.0)) throw PreconditionError("p_max must be positive");
  if (points < 8) throw PreconditionError("branch table needs at least 8 points");
  const double ws = model.surface_plasmon_frequency();
  const double p_lo = std::min(1e-5 * ws, 1e-5 * p_max);
  table_.reserve(static_cast<std::size_t>(points));
  std::optional<cplx> seed;
  for (int i = 0; i < points; ++i) {
    const double frac = static_cast<double>(i) / (points - 1);
    const double p = p_max * std::pow(p_lo / p_max, frac);
    PlasmonMode m = dispersion_lossy(model, p, seed);
    seed = m.omega_bar;
    table_.push_back(m);
  }
}

PlasmonMode PlasmonBranch::mode(double p) const {
  if (!(p > 0.0)) throw PreconditionError("branch query needs p > 0");
  // table_ is descending in p; pick the neighbour in log p.
  const auto it = std::lower_bound(table_.begin(), table_.end(), p,
                                   [](const PlasmonMode& m, double v) { return m.p > v; });
  const PlasmonMode* nearest = nullptr;
  if (it == table_.end()) {
    nearest = &table_.back();
  } else if (it == table_.begin()) {
    nearest = &table_.front();
  } else {
    const auto prev = it - 1;
    nearest = std::abs(std::log(prev->p / p)) < std::abs(std::log(it->p / p)) ? &*prev : &*it;
  }
  // Scale the neighbour's root to the query momentum before refining.
  cplx seed = nearest->omega_bar;
  const PlasmonMode ref_here = dispersion_lossless(model_, p);
  const PlasmonMode ref_there = dispersion_lossless(model_, nearest->p);
  if (std::abs(ref_there.omega_bar) > 0.0) {
    seed += ref_here.omega_bar - ref_there.omega_bar;
  }
  return dispersion_lossy(model_, p, seed);
}

std::vector<PlasmonMode> scan_lossy(const SurfaceModel& model, const std::vector<double>& p_grid) {
  std::vector<std::size_t> order(p_grid.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return p_grid[a] > p_grid[b]; });
  std::vector<PlasmonMode> out(p_grid.size());
  std::optional<cplx> seed;
  double previous = 0.0;
  for (const std::size_t i : order) {
    // Continuation only across small steps; the default seed is better after a large jump.
    if (p_grid[i] < 0.5 * previous) seed.reset();
    out[i] = dispersion_lossy(model, p_grid[i], seed);
    seed = out[i].omega_bar;
    previous = p_grid[i];
  }
  return out;
}

std::vector<ReflectionMapPoint> reflection_map(const SurfaceModel& model, double p_max, int p_points,
                                               double omega_min, double omega_max, int omega_points) {
  require_drude(model);
  if (p_points < 2 || omega_points < 2) throw PreconditionError("reflection map needs >= 2 points per axis");
  std::vector<ReflectionMapPoint> out;
  out.reserve(static_cast<std::size_t>(p_points) * omega_points);
  for (int i = 0; i < p_points; ++i) {
    const double p = p_max * i / (p_points - 1);
    for (int j = 0; j < omega_points; ++j) {
      const double w = omega_min + (omega_max - omega_min) * j / (omega_points - 1);
      double value = 0.0;
      if (w != 0.0) {
        try {
          value = std::abs(reflection(model, w, p, Polarization::P).imag());
        } catch (const PoleError&) {
          value = std::numeric_limits<double>::infinity();
        }
      }
      out.push_back({p, w, value});
    }
  }
  return out;
}

}  // namespace dyncp
