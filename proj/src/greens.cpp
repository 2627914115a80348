#include "dyncp/greens.hpp"

#include <cmath>
#include <numbers>

#include "dyncp/errors.hpp"
#include "dyncp/quadrature.hpp"

namespace dyncp {

namespace {

constexpr double kPi = std::numbers::pi;

void check_distance(double z) {
  if (!(z > 0.0) || !std::isfinite(z)) throw PreconditionError("distance z must be positive");
}

struct Weights {
  double tangential;
  double normal;
};

// Bracket of the kappa-form integrand: w_t (k^2 r_p + w^2 r_s) + w_n 2 p^2 r_p with p^2 = k^2 + w^2.
cplx bracket(const Weights& w, cplx k, cplx omega, const FresnelPair& r) {
  const cplx k2 = k * k;
  const cplx w2 = omega * omega;
  return w.tangential * (k2 * r.rp + w2 * r.rs) + w.normal * 2.0 * (k2 + w2) * r.rp;
}

// Coefficient multiplying r_p in bracket().
cplx rp_weight(const Weights& w, cplx k, cplx omega) {
  return w.tangential * k * k + w.normal * 2.0 * (k * k + omega * omega);
}

FresnelPair fresnel_tracked(const SurfaceModel& model, cplx omega, cplx k, cplx shift, bool flip) {
  if (!model.is_drude()) return {-1.0, 1.0};
  if (omega == cplx(0.0)) return {0.0, 1.0};
  cplx km = std::sqrt(k * k + shift);
  if (km.real() < 0.0) km = -km;
  if (flip) km = -km;
  return fresnel_at_kappa(model, omega, k, km);
}

quad::Spec ray_spec(double z, const GreenOptions& options) {
  quad::Spec spec;
  spec.rel_tol = options.rel_tol;
  spec.max_subdivisions = options.max_subdivisions;
  spec.transform = quad::Transform::exp_weighted(2.0 * z);
  return spec;
}

quad::Result checked(const quad::Result& r, const char* what) {
  if (!r.converged) throw QuadratureError(what, r.value, r.error_bound);
  return r;
}

}  // namespace

DipoleSpec DipoleSpec::isotropic(double magnitude_sq) {
  DipoleSpec d;
  d.magnitude_sq = magnitude_sq;
  d.validate();
  return d;
}

DipoleSpec DipoleSpec::axis_aligned(double magnitude_sq, const std::array<double, 3>& axis) {
  DipoleSpec d;
  d.magnitude_sq = magnitude_sq;
  d.orientation = Orientation::AxisAligned;
  d.axis = axis;
  d.validate();
  return d;
}

void DipoleSpec::validate() const {
  if (!(magnitude_sq > 0.0) || !std::isfinite(magnitude_sq)) {
    throw PreconditionError("dipole magnitude_sq must be positive");
  }
  if (orientation == Orientation::AxisAligned) {
    const double n2 = axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2];
    if (std::abs(n2 - 1.0) > 1e-9) throw PreconditionError("dipole axis must be a unit vector");
  }
}

double DipoleSpec::tangential_weight() const {
  if (orientation == Orientation::Isotropic) return 2.0 * magnitude_sq / 3.0;
  return magnitude_sq * (1.0 - axis[2] * axis[2]);
}

double DipoleSpec::normal_weight() const {
  if (orientation == Orientation::Isotropic) return magnitude_sq / 3.0;
  return magnitude_sq * axis[2] * axis[2];
}

cplx green_envelope(const SurfaceModel& model, const DipoleSpec& dipole, double z, cplx omega,
                    const GreenOptions& options) {
  check_distance(z);
  dipole.validate();
  const Weights w{dipole.tangential_weight(), dipole.normal_weight()};
  const cplx k0 = cplx(0.0, -1.0) * omega;

  if (!model.is_drude()) {
    // Exact moments of e^{-2xz} along the ray: int (k0+x)^n e^{-2xz} dx.
    const double a = 2.0 * z;
    const cplx i0 = 1.0 / a;
    const cplx i2 = k0 * k0 / a + 2.0 * k0 / (a * a) + 2.0 / (a * a * a);
    const cplx w2 = omega * omega;
    return (w.tangential * (i2 - w2 * i0) + w.normal * 2.0 * (i2 + w2 * i0)) / (8.0 * kPi);
  }

  const cplx shift = omega == cplx(0.0) ? cplx(0.0) : bulk_shift(model, omega);
  // Im(k^2 + shift) is linear along the ray; a zero with negative real part marks where the
  // principal medium root jumps, and the root reached continuously from x = inf is the negative
  // one before it.
  double x_flip = -1.0;
  if (k0.imag() != 0.0) {
    const cplx q0 = k0 * k0 + shift;
    const double xs = -q0.imag() / (2.0 * k0.imag());
    if (xs > 0.0 && ((k0 + xs) * (k0 + xs) + shift).real() < 0.0) x_flip = xs;
  }

  // Exponential weight measured from `origin` so that long segments cannot overflow.
  const auto integrand = [&](double x, bool flip, double origin) -> cplx {
    const cplx k = k0 + x;
    return std::exp(-2.0 * (x - origin) * z) *
           bracket(w, k, omega, fresnel_tracked(model, omega, k, shift, flip));
  };
  const quad::Spec spec = ray_spec(z, options);
  cplx total;
  if (x_flip > 0.0) {
    quad::Spec finite = spec;
    finite.transform = quad::Transform::none();
    total = checked(quad::integrate([&](double x) { return integrand(x, true, 0.0); }, 0.0, x_flip, finite),
                    "Green quadrature (tracked segment) did not converge")
                .value;
    total += std::exp(-2.0 * x_flip * z) *
             checked(quad::integrate_semi_infinite(
                         [&](double x) { return integrand(x, false, x_flip); },
                         x_flip, spec),
                     "Green quadrature did not converge")
                 .value;
  } else {
    total = checked(quad::integrate_semi_infinite([&](double x) { return integrand(x, false, 0.0); }, 0.0, spec),
                    "Green quadrature did not converge")
                .value;
  }
  return total / (8.0 * kPi);
}

GreenTrace green_reflected(const SurfaceModel& model, const DipoleSpec& dipole, double z, cplx omega,
                           const GreenOptions& options) {
  if (omega.imag() < 0.0) {
    throw PreconditionError("green_reflected needs w in the closed upper half-plane");
  }
  const cplx g = green_envelope(model, dipole, z, omega, options);
  return {g * std::exp(cplx(0.0, 2.0) * omega * z), z, omega};
}

GreenTrace green_perfect_closed(const DipoleSpec& dipole, double z, cplx omega) {
  check_distance(z);
  dipole.validate();
  const cplx u = 2.0 * omega * z;
  const cplx iu = cplx(0.0, 1.0) * u;
  const cplx tangential = 2.0 - 2.0 * iu - 2.0 * u * u;
  const cplx normal = 2.0 * (2.0 - 2.0 * iu);
  const cplx value = (dipole.tangential_weight() * tangential + dipole.normal_weight() * normal) *
                     std::exp(iu) / (64.0 * kPi * z * z * z);
  return {value, z, omega};
}

GreenTrace green_near_field(const SurfaceModel& model, const DipoleSpec& dipole, double z, cplx omega) {
  check_distance(z);
  dipole.validate();
  cplx rp = 1.0;
  if (model.is_drude()) {
    const cplx e = epsilon(model, omega);
    rp = (e - 1.0) / (e + 1.0);
  }
  // d^2 + d_z^2 = w_t + 2 w_n.
  const double weight = dipole.tangential_weight() + 2.0 * dipole.normal_weight();
  return {weight * rp / (32.0 * kPi * z * z * z), z, omega};
}

cplx green_leg_envelope(const SurfaceModel& model, const DipoleSpec& dipole, double z, double eta,
                        const GreenOptions& options) {
  check_distance(z);
  dipole.validate();
  if (!(eta > 0.0)) throw PreconditionError("leg abscissa eta must be positive");
  const cplx omega(0.0, -eta);
  if (!model.is_drude()) return green_envelope(model, dipole, z, omega, options);

  const Weights w{dipole.tangential_weight(), dipole.normal_weight()};
  const double gamma = model.damping_rate();
  if (std::abs(eta - gamma) < 1e-14 * std::max(1.0, gamma)) {
    throw PoleError("leg evaluated at the Drude pole w = -i gamma", omega);
  }
  const cplx e = epsilon(model, omega);
  const cplx shift = bulk_shift(model, omega);  // real on this axis

  // Real kappa axis from -eta. A negative shift (eta < gamma) puts a stretch of the path on the
  // medium-root cut; approaching from Re w < 0 selects the +i root there.
  const auto medium_root = [&](double k) -> cplx {
    const double q = k * k + shift.real();
    return q >= 0.0 ? cplx(std::sqrt(q), 0.0) : cplx(0.0, std::sqrt(-q));
  };
  const auto weighted = [&](double x, double origin) -> cplx {
    const double k = x - eta;
    return std::exp(-2.0 * (x - origin) * z) *
           bracket(w, k, omega, fresnel_at_kappa(model, omega, k, medium_root(k)));
  };
  const auto integrand = [&](double x) { return weighted(x, 0.0); };
  const quad::Spec spec = ray_spec(z, options);
  quad::Spec finite = spec;
  finite.transform = quad::Transform::none();

  if (eta <= gamma) {
    const auto head = checked(quad::integrate(integrand, 0.0, eta, finite), "leg quadrature did not converge");
    const auto tail = checked(quad::integrate_semi_infinite(
                                  [&](double x) { return weighted(x, eta); }, eta, spec),
                              "leg quadrature did not converge");
    return (head.value + std::exp(-2.0 * eta * z) * tail.value) / (8.0 * kPi);
  }

  // Surface-plasmon pole of r_p on the path: k_p = -eta / sqrt(1 + eps), eps real > 1 here.
  const double kp = -eta / std::sqrt(1.0 + e.real());
  const double xp = kp + eta;
  const cplx kmp = -e * kp;
  const cplx res_rp = (e * kp - kmp) / (e + kp / kmp);  // residue of r_p in k
  const cplx res = std::exp(-2.0 * xp * z) * res_rp * rp_weight(w, kp, omega);

  // Side of the path the pole falls on when w moves slightly to the left of the axis.
  const double delta = 1e-7 * eta;
  const cplx wl = omega - delta;
  const cplx el = epsilon(model, wl);
  cplx kpl = std::sqrt(bulk_shift(model, wl) / (el * el - 1.0));
  if (std::abs(kpl - kp) > std::abs(-kpl - kp)) kpl = -kpl;
  const double side = (kpl - cplx(0.0, -1.0) * wl).imag() > 0.0 ? 1.0 : -1.0;

  const auto folded = [&](double u) { return integrand(xp - u) + integrand(xp + u); };
  const auto pv = checked(quad::integrate(folded, 0.0, xp, finite), "leg principal value did not converge");
  const auto tail = checked(quad::integrate_semi_infinite(
                                [&](double x) { return weighted(x, 2.0 * xp); }, 2.0 * xp, spec),
                            "leg quadrature did not converge");
  const cplx value = pv.value + std::exp(-4.0 * xp * z) * tail.value + side * cplx(0.0, kPi) * res;
  return value / (8.0 * kPi);
}

}  // namespace dyncp
