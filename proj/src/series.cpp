#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "dyncp/errors.hpp"
#include "dyncp/potentials.hpp"

namespace dyncp {

void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  const auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        const std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned k = 0; k < threads; ++k) pool.emplace_back(worker);
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

PotentialSeries PotentialSeries::normalized() const {
  PotentialSeries out = *this;
  const double s = reference_scale;
  const auto scale_all = [s](std::vector<double>& v) {
    for (double& x : v) x /= s;
  };
  out.u_stat /= s;
  scale_all(out.u_dyn);
  scale_all(out.delta_u_res);
  scale_all(out.total);
  if (out.delta_u_partial) scale_all(*out.delta_u_partial);
  out.normalization = Normalization::RelativeToStatic;
  out.reference_scale = 1.0;
  return out;
}

namespace {

void check_times(const std::vector<double>& times) {
  if (times.empty()) throw PreconditionError("time grid is empty");
  for (double t : times) {
    if (!(t >= 0.0) || !std::isfinite(t)) throw PreconditionError("time grid must be finite and >= 0");
  }
}

PotentialSeries allocate(const std::vector<double>& times, double reference) {
  PotentialSeries s;
  s.time_grid = times;
  s.u_dyn.assign(times.size(), 0.0);
  s.delta_u_res.assign(times.size(), 0.0);
  s.total.assign(times.size(), 0.0);
  s.light_cone_flag.assign(times.size(), false);
  s.reference_scale = reference;
  return s;
}

bool resonant_applies(const DynamicPotential& pot, const SeriesOptions& opts, double t) {
  const auto& cfg = pot.config();
  return opts.with_resonant && cfg.surface.is_drude() && cfg.surface.damping_rate() > 0.0 &&
         t > 2.0 * cfg.z && !pot.near_light_cone(t);
}

}  // namespace

PotentialSeries dress_series(const AtomSurfaceConfig& cfg, const std::vector<double>& times,
                             const SeriesOptions& options) {
  check_times(times);
  const DynamicPotential pot(cfg, options.potential);
  const double us = pot.u_static();
  PotentialSeries s = allocate(times, std::abs(us));
  s.u_stat = us;
  std::vector<char> flags(times.size(), 0);
  parallel_for(times.size(), options.threads, [&](std::size_t i) {
    const DynamicValue d = pot.u_dyn(times[i]);
    s.u_dyn[i] = d.value;
    s.total[i] = us + d.value;
    flags[i] = d.near_light_cone ? 1 : 0;
    if (resonant_applies(pot, options, times[i])) s.delta_u_res[i] = pot.delta_u_res(times[i]);
  });
  for (std::size_t i = 0; i < times.size(); ++i) s.light_cone_flag[i] = flags[i] != 0;
  return s;
}

PotentialSeries u_partial_stark(const AtomSurfaceConfig& cfg, const StarkShift& quench,
                                const std::vector<double>& times, const SeriesOptions& options) {
  check_times(times);
  if (!(quench.new_omega > 0.0)) throw PreconditionError("shifted frequency must be positive");
  cfg.validate();
  const double reference = std::abs(DynamicPotential(cfg, options.potential).u_static());
  AtomSurfaceConfig shifted = cfg;
  shifted.omega = quench.new_omega;
  const DynamicPotential pot(shifted, options.potential);
  const double w_new = quench.new_omega;
  const double w_old = cfg.omega;
  const double us = pot.u_static();

  PotentialSeries s = allocate(times, reference);
  s.u_stat = us;
  s.delta_u_partial = std::vector<double>(times.size(), 0.0);
  std::vector<char> flags(times.size(), 0);
  parallel_for(times.size(), options.threads, [&](std::size_t i) {
    const double t = times[i];
    const DynamicValue dyn = pot.frequency_integral(t, w_new, w_new);
    const DynamicValue old = pot.frequency_integral(t, w_new, w_old);
    s.u_dyn[i] = dyn.value;
    (*s.delta_u_partial)[i] = -old.value;
    s.total[i] = us + dyn.value - old.value;
    flags[i] = dyn.near_light_cone ? 1 : 0;
    if (resonant_applies(pot, options, t)) s.delta_u_res[i] = pot.delta_u_res(t);
  });
  for (std::size_t i = 0; i < times.size(); ++i) s.light_cone_flag[i] = flags[i] != 0;
  return s;
}

PotentialSeries u_partial_dipole(const AtomSurfaceConfig& cfg, const DipoleChange& quench,
                                 const std::vector<double>& times, const SeriesOptions& options) {
  check_times(times);
  if (!(quench.new_magnitude_sq > 0.0)) throw PreconditionError("new dipole magnitude must be positive");
  cfg.validate();
  const double d2 = cfg.dipole.magnitude_sq;
  if (quench.overlap * quench.overlap > quench.new_magnitude_sq * d2 * (1.0 + 1e-12)) {
    throw PreconditionError("dipole overlap exceeds |d~||d|");
  }
  const DynamicPotential pot(cfg, options.potential);
  const double reference = std::abs(pot.u_static());
  const double weight = (quench.new_magnitude_sq - quench.overlap) / d2;

  PotentialSeries s = allocate(times, reference);
  s.u_stat = pot.u_static() * quench.new_magnitude_sq / d2;
  std::vector<char> flags(times.size(), 0);
  parallel_for(times.size(), options.threads, [&](std::size_t i) {
    const double t = times[i];
    flags[i] = pot.near_light_cone(t) ? 1 : 0;
    if (weight != 0.0) {
      const DynamicValue d = pot.u_dyn(t);
      s.u_dyn[i] = weight * d.value;
      if (resonant_applies(pot, options, t)) s.delta_u_res[i] = weight * pot.delta_u_res(t);
    }
    s.total[i] = s.u_stat + s.u_dyn[i];
  });
  for (std::size_t i = 0; i < times.size(); ++i) s.light_cone_flag[i] = flags[i] != 0;
  return s;
}

double decay_time_estimate(const SurfaceModel& model, double z, double tau) {
  if (!model.is_drude()) throw UnsupportedOperation("decay time needs a Drude surface");
  if (!(z > 0.0)) throw PreconditionError("distance z must be positive");
  return tau * std::numbers::pi * std::sqrt(z / model.surface_plasmon_frequency());
}

double Envelope::operator()(double at) const {
  const std::size_t n = t.size();
  if (n == 0) throw FitError("empty envelope");
  if (n == 1 || at <= t.front()) return peak.front();
  if (at >= t.back()) return peak.back();
  // Fritsch-Carlson monotone cubic Hermite interpolation.
  std::vector<double> h(n - 1), delta(n - 1), m(n);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    h[k] = t[k + 1] - t[k];
    delta[k] = (peak[k + 1] - peak[k]) / h[k];
  }
  m.front() = delta.front();
  m.back() = delta.back();
  for (std::size_t k = 1; k + 1 < n; ++k) {
    if (delta[k - 1] * delta[k] <= 0.0) {
      m[k] = 0.0;
    } else {
      const double w1 = 2.0 * h[k] + h[k - 1];
      const double w2 = h[k] + 2.0 * h[k - 1];
      m[k] = (w1 + w2) / (w1 / delta[k - 1] + w2 / delta[k]);
    }
  }
  const auto it = std::upper_bound(t.begin(), t.end(), at);
  const std::size_t k = static_cast<std::size_t>(it - t.begin()) - 1;
  const double s = (at - t[k]) / h[k];
  const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
  const double h10 = s * (1 - s) * (1 - s);
  const double h01 = s * s * (3 - 2 * s);
  const double h11 = s * s * (s - 1);
  return h00 * peak[k] + h10 * h[k] * m[k] + h01 * peak[k + 1] + h11 * h[k] * m[k + 1];
}

Envelope envelope_of(const std::vector<double>& times, const std::vector<double>& values) {
  if (times.size() != values.size()) throw PreconditionError("times and values differ in length");
  Envelope env;
  for (std::size_t i = 1; i + 1 < times.size(); ++i) {
    const double a = std::abs(values[i - 1]);
    const double b = std::abs(values[i]);
    const double c = std::abs(values[i + 1]);
    if (!(std::isfinite(a) && std::isfinite(b) && std::isfinite(c))) continue;
    if (b >= a && b > c) {
      // Parabolic refinement of the peak position and height.
      const double den = a - 2.0 * b + c;
      double shift = 0.0;
      double height = b;
      if (den < 0.0) {
        shift = 0.5 * (a - c) / den;
        height = b - 0.25 * (a - c) * shift;
      }
      const double dt = 0.5 * (times[i + 1] - times[i - 1]);
      env.t.push_back(times[i] + shift * dt);
      env.peak.push_back(height);
    }
  }
  return env;
}

DecayTimeResult decay_time(const AtomSurfaceConfig& cfg, const std::vector<double>& times,
                           const DecayTimeOptions& options) {
  check_times(times);
  if (!std::is_sorted(times.begin(), times.end())) throw PreconditionError("time grid must be increasing");
  const double estimate = decay_time_estimate(cfg.surface, cfg.z, options.tau);
  if (times.front() > 0.0) throw PreconditionError("scan grid must start at t = 0");
  if (times.back() < 5.0 * estimate) throw PreconditionError("scan grid must reach 5 x the estimated decay time");
  if (times.size() < 8) throw PreconditionError("too few scan points");
  const std::vector<double>& grid = times;

  const DynamicPotential pot(cfg, options.potential);
  std::vector<double> values(grid.size());
  parallel_for(grid.size(), options.threads, [&](std::size_t i) { values[i] = pot.delta_u_res(grid[i]); });

  Envelope env = envelope_of(grid, values);
  // The residue term starts near -U_stat at t = 0; the first sample leads the envelope when it is largest.
  if (std::abs(values[0]) >= std::abs(values[1]) && (env.t.empty() || std::abs(values[0]) > env.peak.front())) {
    env.t.insert(env.t.begin(), grid[0]);
    env.peak.insert(env.peak.begin(), std::abs(values[0]));
  }
  if (env.t.size() < 2) throw FitError("too few envelope maxima");
  const double reference = env.peak.front();
  const double threshold = reference / std::numbers::e;
  for (std::size_t k = 1; k < env.t.size(); ++k) {
    if (env.peak[k] > (1.0 + options.monotone_tolerance) * env.peak[k - 1]) {
      throw FitError("envelope rises between successive maxima");
    }
    if (env.peak[k] <= threshold) {
      double lo = env.t[k - 1];
      double hi = env.t[k];
      for (int it = 0; it < 100; ++it) {
        const double mid = 0.5 * (lo + hi);
        (env(mid) > threshold ? lo : hi) = mid;
      }
      DecayTimeResult out;
      out.z = cfg.z;
      out.t_decay_numeric = 0.5 * (lo + hi);
      out.t_decay_estimate = estimate;
      out.tau = options.tau;
      return out;
    }
  }
  throw FitError("envelope does not fall to 1/e within the scan");
}

}  // namespace dyncp
