#include "dyncp/potentials.hpp"

#include <algorithm>
#include <cmath>
#include <mutex>
#include <numbers>

#include "dyncp/chebyshev.hpp"
#include "dyncp/errors.hpp"
#include "dyncp/plasmon.hpp"
#include "dyncp/quadrature.hpp"

namespace dyncp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr cplx kI{0.0, 1.0};
// Absolute quadrature floor in units of |U_stat|.
constexpr double kAbsFloor = 1e-11;

quad::Result require(const quad::Result& r, const char* what) {
  if (!r.converged) throw QuadratureError(what, r.value, r.error_bound);
  return r;
}

// Momentum at which the lossless branch reaches |w| = omega (< w_sp).
double momentum_for_frequency(double ws, double omega) {
  const double w2 = omega * omega;
  return std::sqrt(w2 * (2.0 * ws * ws - w2) / (2.0 * (ws * ws - w2)));
}

// Momentum at which the lossless decay constant reaches kappa.
double momentum_for_decay(double ws, double kappa) {
  const double k2 = kappa * kappa;
  return std::pow(k2 * k2 + 2.0 * k2 * ws * ws, 0.25);
}

}  // namespace

void AtomSurfaceConfig::validate() const {
  if (!(z > 0.0) || !std::isfinite(z)) throw PreconditionError("distance z must be positive");
  if (!(omega > 0.0) || !std::isfinite(omega)) throw PreconditionError("transition frequency must be positive");
  dipole.validate();
  if (dipole.orientation != Orientation::Isotropic) {
    throw PreconditionError("potentials require an isotropic dipole");
  }
}

struct DynamicPotential::Impl {
  AtomSurfaceConfig cfg;
  PotentialOptions opts;
  GreenOptions green;

  mutable std::once_flag static_once;
  mutable double static_value = 0.0;

  mutable std::once_flag table_once;
  mutable std::unique_ptr<ChebyshevTable> table;
  double shift = 1.0;  // X of the shifted leg

  mutable std::once_flag branch_once;
  mutable std::unique_ptr<PlasmonBranch> branch;
  mutable std::mutex branch_mutex;

  Impl(AtomSurfaceConfig c, PotentialOptions o) : cfg(std::move(c)), opts(o) {
    cfg.validate();
    green.rel_tol = opts.green_rel_tol;
    if (cfg.surface.is_drude()) {
      const double wp = cfg.surface.plasma_frequency();
      shift = wp + std::max(1.0, 0.25 * wp);
    } else {
      shift = 1.0;
    }
  }

  double z() const { return cfg.z; }

  cplx envelope(cplx w) const { return green_envelope(cfg.surface, cfg.dipole, cfg.z, w, green); }

  double envelope_imag_axis(double xi) const { return envelope(cplx(0.0, xi)).real(); }

  double static_at(double mu) const {
    const double rate = 2.0 * cfg.z;
    quad::Spec spec;
    spec.rel_tol = opts.imag_axis_rel_tol;
    spec.transform = quad::Transform::log_compress(0.25 * std::min(mu, 1.0 / rate));
    const auto f = [&](double xi) -> cplx {
      return envelope_imag_axis(xi) * std::exp(-rate * xi) * 2.0 * mu / (mu * mu + xi * xi);
    };
    const auto r = require(quad::integrate_semi_infinite(f, 0.0, spec), "static potential quadrature did not converge");
    return -r.value.real() / (2.0 * kPi);
  }

  double scale() const {
    std::call_once(static_once, [&] { static_value = static_at(cfg.omega); });
    return std::abs(static_value);
  }

  // int_0^inf dxi/2pi g(i xi) e^{-rate xi} / den(xi)
  quad::Result imag_axis(double rate, const std::function<cplx(double)>& den) const {
    quad::Spec spec;
    spec.rel_tol = opts.imag_axis_rel_tol;
    spec.abs_tol = kAbsFloor * scale();
    spec.transform = quad::Transform::log_compress(0.25 * std::min(cfg.omega, 1.0 / rate));
    const auto f = [&](double xi) -> cplx {
      return envelope_imag_axis(xi) * std::exp(-rate * xi) / den(xi) / (2.0 * kPi);
    };
    return require(quad::integrate_semi_infinite(f, 0.0, spec), "imaginary-axis quadrature did not converge");
  }

  const ChebyshevTable& real_table() const {
    std::call_once(table_once, [&] {
      std::vector<double> bp{-shift, 0.0};
      if (cfg.surface.is_drude()) {
        const double wp = cfg.surface.plasma_frequency();
        const double g = cfg.surface.damping_rate();
        const double wb = std::sqrt(std::max(wp * wp - 0.25 * g * g, 0.0));
        for (double v : {wb, cfg.surface.surface_plasmon_frequency(), cfg.omega, 0.5 * wb}) {
          if (v > 0.0 && v < shift) bp.push_back(-v);
        }
      }
      std::sort(bp.begin(), bp.end());
      table = std::make_unique<ChebyshevTable>([&](double w) { return envelope(cplx(w, 0.0)); }, bp, 1e-12);
    });
    return *table;
  }

  const PlasmonBranch& plasmon_branch() const {
    std::call_once(branch_once, [&] {
      const double ws = cfg.surface.surface_plasmon_frequency();
      branch = std::make_unique<PlasmonBranch>(cfg.surface, momentum_for_decay(ws, 20.0 / cfg.z));
    });
    return *branch;
  }

  // (d^2 / 12 pi) int dp (p/kbar) e^{-i wbar t - 2 kbar z} (2p^2 - wbar^2) R_p / (mu - wbar)
  cplx resonant_integral(double t, double mu) const {
    if (!cfg.surface.is_drude()) return 0.0;
    const double ws = cfg.surface.surface_plasmon_frequency();
    const double p_max = momentum_for_decay(ws, 20.0 / cfg.z);
    const bool lossy = opts.branch == ResonantBranch::Lossy && cfg.surface.damping_rate() > 0.0;
    const SurfaceModel lossless = SurfaceModel::drude(cfg.surface.plasma_frequency(), 0.0);
    const PlasmonBranch* br = lossy ? &plasmon_branch() : nullptr;
    const double p_lo = lossy ? br->p_min() : 0.0;

    const auto f = [&](double p) -> cplx {
      if (p <= 0.0) return 0.0;
      cplx w;
      cplx k;
      cplx rp;
      if (lossy) {
        const PlasmonMode m = br->mode(p);
        w = m.omega_bar;
        k = m.kappa_bar;
        rp = *m.residue;
      } else {
        const PlasmonMode m = dispersion_lossless(lossless, p);
        w = m.omega_bar;
        k = m.kappa_bar;
        rp = residue_rp(lossless, w, p);
      }
      return (p / k) * std::exp(-kI * w * t - 2.0 * k * cfg.z) * (2.0 * p * p - w * w) * rp / (mu - w);
    };

    // Breakpoints where the lossless phase |wbar| t advances by pi, then geometric to p_max.
    std::vector<double> bp{p_lo};
    const double step = kPi / std::max(t, 1e-12);
    for (int k = 1; k * step < 0.98 * ws && bp.size() < 4000; ++k) {
      const double p = momentum_for_frequency(ws, k * step);
      if (p > p_lo && p < p_max) bp.push_back(p);
    }
    double last = std::max(bp.back(), std::max(p_lo, 1e-3 * ws));
    while (last < p_max) {
      last = std::min(p_max, 1.5 * last + 0.05 * ws);
      bp.push_back(last);
    }
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());

    quad::Spec spec;
    spec.rel_tol = opts.momentum_rel_tol;
    spec.abs_tol = kAbsFloor * scale() * 12.0 * kPi / cfg.dipole.magnitude_sq;
    spec.max_subdivisions = static_cast<int>(bp.size()) + 4000;
    const auto r = require(quad::integrate(f, bp, spec), "resonant momentum integral did not converge");
    return cfg.dipole.magnitude_sq * r.value / (12.0 * kPi);
  }

  // J = int_{-inf}^0 dw/2pi G(w) e^{-i w t} / (mu - w), for t > 2z, on the shifted closure.
  cplx shifted_closure(double t, double mu) const {
    const double tau = t - 2.0 * cfg.z;
    const double x = shift;
    const ChebyshevTable& tab = real_table();

    std::vector<double> bp = tab.edges();
    const double step = kPi / tau;
    for (double w = -x + step; w < 0.0; w += step) bp.push_back(w);
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    quad::Spec spec;
    spec.rel_tol = opts.imag_axis_rel_tol;
    spec.abs_tol = kAbsFloor * scale();
    spec.max_subdivisions = static_cast<int>(bp.size()) + 4000;
    const auto seg = require(
        quad::integrate([&](double w) { return tab(w) * std::exp(-kI * w * tau) / (mu - w) / (2.0 * kPi); }, bp, spec),
        "real-axis segment quadrature did not converge");

    quad::Spec vspec;
    vspec.rel_tol = opts.imag_axis_rel_tol;
    vspec.abs_tol = kAbsFloor * scale();
    vspec.transform = quad::Transform::exp_weighted(tau);
    const cplx phase = std::exp(kI * x * tau);
    const auto vert = require(quad::integrate_semi_infinite(
                                  [&](double y) {
                                    return envelope(cplx(-x, -y)) * phase * std::exp(-y * tau) /
                                           (mu + x + kI * y) / (2.0 * kPi);
                                  },
                                  0.0, vspec),
                              "vertical-leg quadrature did not converge");
    return seg.value + kI * vert.value;
  }

  // -int_0^inf deta/2pi G(-i eta) e^{-eta t} / (mu + i eta), approached from Re w < 0.
  cplx negative_leg(double t, double mu) const {
    const double tau = t - 2.0 * cfg.z;
    quad::Spec spec;
    spec.rel_tol = opts.imag_axis_rel_tol;
    spec.abs_tol = kAbsFloor * scale();
    const auto f = [&](double eta) -> cplx {
      return green_leg_envelope(cfg.surface, cfg.dipole, cfg.z, eta, green) * std::exp(-eta * tau) /
             (mu + kI * eta) / (2.0 * kPi);
    };
    quad::Result r;
    const double g = cfg.surface.is_drude() ? cfg.surface.damping_rate() : 0.0;
    if (g > 0.0) {
      r = require(quad::integrate(f, 0.0, g, spec), "leg quadrature did not converge");
      spec.transform = quad::Transform::exp_weighted(tau);
      r += require(quad::integrate_semi_infinite([&](double eta) { return f(eta); }, g, spec),
                   "leg quadrature did not converge");
    } else {
      spec.transform = quad::Transform::exp_weighted(tau);
      r = require(quad::integrate_semi_infinite(f, 0.0, spec), "leg quadrature did not converge");
    }
    return -r.value;
  }

  bool near_cone(double t) const {
    return std::abs(t - 2.0 * cfg.z) <= opts.light_cone_window * 2.0 * cfg.z;
  }

  DynamicValue contour(double t, double nu, double mu) const {
    if (!(t >= 0.0)) throw PreconditionError("time must be >= 0");
    DynamicValue out;
    out.near_light_cone = near_cone(t);
    const auto compute = [&]() {
      const cplx rot = std::exp(kI * nu * t);
      const auto i1 = imag_axis(t + 2.0 * cfg.z, [&](double xi) { return kI * xi + mu; });
      double value = (rot * i1.value).real();
      double err = i1.error_bound;
      if (t < 2.0 * cfg.z) {
        const auto i2 = imag_axis(2.0 * cfg.z - t, [&](double xi) { return mu - kI * xi; });
        value += (rot * i2.value).real();
        err += i2.error_bound;
      } else if (t > 2.0 * cfg.z) {
        if (opts.closure == ContourClosure::ShiftedLeg) {
          value += (kI * rot * shifted_closure(t, mu)).real();
        } else {
          value += (rot * (negative_leg(t, mu) + resonant_integral(t, mu))).real();
        }
      } else {
        throw DomainError("dynamic potential diverges on the light cone", t);
      }
      out.value = value;
      out.error_bound = err;
    };
    if (out.near_light_cone) {
      try {
        compute();
      } catch (const Error&) {
        out.value = std::numeric_limits<double>::quiet_NaN();
        out.error_bound = std::numeric_limits<double>::infinity();
      }
    } else {
      compute();
    }
    return out;
  }

  DynamicValue oracle(double t, double nu, double mu) const {
    if (!(t >= 0.0)) throw PreconditionError("time must be >= 0");
    DynamicValue out;
    out.near_light_cone = near_cone(t);
    const double z = cfg.z;
    double w0 = std::max({2.0, 4.0 * mu, 4.0 * nu});
    if (cfg.surface.is_drude()) w0 = std::max(w0, 3.0 * cfg.surface.plasma_frequency());

    quad::Spec spec;
    spec.rel_tol = opts.oracle_rel_tol;
    spec.abs_tol = kAbsFloor * scale();
    std::vector<double> bp{0.0};
    const double step = kPi / (2.0 * z + t);
    for (double w = step; w < w0; w += step) bp.push_back(w);
    bp.push_back(w0);
    spec.max_subdivisions = static_cast<int>(bp.size()) + 4000;
    const auto head = require(quad::integrate(
                                  [&](double w) -> cplx {
                                    const cplx g = green_envelope(cfg.surface, cfg.dipole, z, w, green) *
                                                   std::exp(kI * 2.0 * w * z);
                                    return g.imag() * 2.0 * std::cos((nu + w) * t) / (mu + w) / (2.0 * kPi);
                                  },
                                  bp, spec),
                              "oracle head quadrature did not converge");
    double value = head.value.real();
    double err = head.error_bound;
    for (const double s : {1.0, -1.0}) {
      const double fr = 2.0 * z + s * t;
      if (std::abs(fr) < 1e-12 * (2.0 * z)) throw DomainError("oracle diverges on the light cone", t);
      const cplx rot = std::exp(kI * s * nu * t);
      const auto piece = [&](double w) -> cplx {
        return green_envelope(cfg.surface, cfg.dipole, z, w, green) * std::exp(kI * fr * w) * rot / (mu + w) /
               (2.0 * kPi);
      };
      // The oscillation in w has period 2 pi / |fr|; segment boundaries are aligned to w0.
      const auto tail = quad::integrate_oscillatory(piece, w0, w0, std::abs(fr), spec);
      if (!tail.converged) throw QuadratureError("oracle tail acceleration did not converge", tail.value, tail.error_bound);
      value += tail.value.imag();
      err += tail.error_bound;
    }
    out.value = value;
    out.error_bound = err;
    return out;
  }
};

DynamicPotential::DynamicPotential(AtomSurfaceConfig cfg, PotentialOptions options)
    : impl_(std::make_unique<Impl>(std::move(cfg), options)) {}
DynamicPotential::~DynamicPotential() = default;
DynamicPotential::DynamicPotential(DynamicPotential&&) noexcept = default;
DynamicPotential& DynamicPotential::operator=(DynamicPotential&&) noexcept = default;

const AtomSurfaceConfig& DynamicPotential::config() const { return impl_->cfg; }
const PotentialOptions& DynamicPotential::options() const { return impl_->opts; }

double DynamicPotential::u_static(std::optional<double> mu) const {
  if (!mu || *mu == impl_->cfg.omega) {
    impl_->scale();
    return impl_->static_value;
  }
  if (!(*mu > 0.0)) throw PreconditionError("static potential needs a positive frequency");
  return impl_->static_at(*mu);
}

DynamicValue DynamicPotential::u_dyn(double t) const {
  return impl_->contour(t, impl_->cfg.omega, impl_->cfg.omega);
}

DynamicValue DynamicPotential::u_dyn_oracle(double t) const {
  return impl_->oracle(t, impl_->cfg.omega, impl_->cfg.omega);
}

DynamicValue DynamicPotential::frequency_integral(double t, double nu, double mu) const {
  if (!(nu > 0.0) || !(mu > 0.0)) throw PreconditionError("frequencies must be positive");
  return impl_->contour(t, nu, mu);
}

DynamicValue DynamicPotential::frequency_integral_oracle(double t, double nu, double mu) const {
  if (!(nu > 0.0) || !(mu > 0.0)) throw PreconditionError("frequencies must be positive");
  return impl_->oracle(t, nu, mu);
}

cplx DynamicPotential::delta_u_res_amplitude(double t) const {
  if (!(t >= 0.0) || !std::isfinite(t)) throw PreconditionError("time must be finite and non-negative");
  if (!impl_->cfg.surface.is_drude()) throw UnsupportedOperation("resonant term needs a Drude surface");
  const double w = impl_->cfg.omega;
  return std::exp(kI * w * t) * impl_->resonant_integral(t, w);
}

double DynamicPotential::delta_u_res(double t) const { return delta_u_res_amplitude(t).real(); }

bool DynamicPotential::near_light_cone(double t) const { return impl_->near_cone(t); }

double u_static(const AtomSurfaceConfig& cfg, const PotentialOptions& options) {
  return DynamicPotential(cfg, options).u_static();
}

DynamicValue u_dyn_contour(const AtomSurfaceConfig& cfg, double t, const PotentialOptions& options) {
  return DynamicPotential(cfg, options).u_dyn(t);
}

DynamicValue u_dyn_oracle(const AtomSurfaceConfig& cfg, double t, const PotentialOptions& options) {
  return DynamicPotential(cfg, options).u_dyn_oracle(t);
}

double delta_u_res(const AtomSurfaceConfig& cfg, double t, const PotentialOptions& options) {
  return DynamicPotential(cfg, options).delta_u_res(t);
}

double delta_u_res_near_field(const AtomSurfaceConfig& cfg, double t) {
  cfg.validate();
  if (!(t >= 0.0)) throw PreconditionError("time must be >= 0");
  const cplx pole = near_field_pole(cfg.surface);
  const double ws = cfg.surface.surface_plasmon_frequency();
  const double z3 = cfg.z * cfg.z * cfg.z;
  const cplx den = cfg.omega - pole;
  return cfg.dipole.magnitude_sq * ws / (48.0 * kPi * z3) * (std::exp(kI * den * t) / den).real();
}

}  // namespace dyncp
