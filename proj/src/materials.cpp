#include "dyncp/materials.hpp"

#include <cmath>
#include <sstream>

#include "dyncp/errors.hpp"

namespace dyncp {

namespace {

// Principal root moved to Re >= 0; purely real negative radicands (real frequencies) take the
// limit from the upper half-plane, which puts the root on -i sign(Re w) sqrt(-q).
cplx branch_root(cplx q, cplx omega) {
  if (q.imag() == 0.0 && q.real() < 0.0 && omega.imag() == 0.0) {
    const double s = omega.real() >= 0.0 ? 1.0 : -1.0;
    return {0.0, -s * std::sqrt(-q.real())};
  }
  cplx r = std::sqrt(q);
  if (r.real() < 0.0) r = -r;
  return r;
}

}  // namespace

SurfaceModel SurfaceModel::drude(double plasma_frequency, double damping_rate) {
  if (!(plasma_frequency > 0.0) || !std::isfinite(plasma_frequency)) {
    throw PreconditionError("Drude plasma frequency must be positive and finite");
  }
  if (!(damping_rate >= 0.0) || !std::isfinite(damping_rate)) {
    throw PreconditionError("Drude damping rate must be non-negative and finite");
  }
  return {SurfaceKind::Drude, plasma_frequency, damping_rate};
}

SurfaceModel SurfaceModel::perfect() { return {SurfaceKind::PerfectReflector, 0.0, 0.0}; }

double SurfaceModel::surface_plasmon_frequency() const { return wp_ / std::sqrt(2.0); }

SurfaceModel SurfaceModel::scaled(double unit) const {
  if (!(unit > 0.0)) throw PreconditionError("frequency unit must be positive");
  if (!is_drude()) return *this;
  return drude(wp_ / unit, gamma_ / unit);
}

std::string SurfaceModel::describe() const {
  std::ostringstream os;
  if (is_drude()) {
    os << "drude(wp=" << wp_ << ", gamma=" << gamma_ << ")";
  } else {
    os << "perfect";
  }
  return os.str();
}

cplx epsilon(const SurfaceModel& model, cplx omega) {
  if (!model.is_drude()) throw UnsupportedOperation("epsilon is undefined for a perfect reflector");
  if (omega == cplx(0.0)) throw PoleError("Drude permittivity has a pole at w = 0", omega);
  const double wp = model.plasma_frequency();
  return 1.0 - wp * wp / (omega * (omega + cplx(0.0, model.damping_rate())));
}

cplx bulk_shift(const SurfaceModel& model, cplx omega) {
  if (!model.is_drude()) throw UnsupportedOperation("bulk_shift is undefined for a perfect reflector");
  const cplx den = omega + cplx(0.0, model.damping_rate());
  if (den == cplx(0.0)) throw PoleError("Drude response pole at w = -i gamma", omega);
  const double wp = model.plasma_frequency();
  return omega * wp * wp / den;
}

cplx kappa(cplx omega, double p) { return branch_root(p * p - omega * omega, omega); }

cplx kappa_medium(const SurfaceModel& model, cplx omega, double p) {
  if (!model.is_drude()) {
    throw UnsupportedOperation("kappa_medium is undefined for a perfect reflector");
  }
  return branch_root(p * p - omega * omega + bulk_shift(model, omega), omega);
}

cplx reflection(const SurfaceModel& model, cplx omega, double p, Polarization pol) {
  if (!model.is_drude()) return pol == Polarization::S ? cplx(-1.0) : cplx(1.0);
  const cplx k = kappa(omega, p);
  const cplx km = kappa_medium(model, omega, p);
  cplx num;
  cplx den;
  if (pol == Polarization::S) {
    num = k - km;
    den = k + km;
  } else {
    const cplx e = epsilon(model, omega);
    num = e * k - km;
    den = e * k + km;
  }
  if (std::abs(den) < 1e-12 * std::abs(num) || den == cplx(0.0)) {
    throw PoleError("reflection coefficient evaluated at a pole", omega, p);
  }
  return num / den;
}

FresnelPair fresnel_at_kappa(const SurfaceModel& model, cplx omega, cplx k) {
  if (!model.is_drude()) return {-1.0, 1.0};
  cplx km = std::sqrt(k * k + bulk_shift(model, omega));
  if (km.real() < 0.0) km = -km;
  return fresnel_at_kappa(model, omega, k, km);
}

FresnelPair fresnel_at_kappa(const SurfaceModel& model, cplx omega, cplx k, cplx kappa_m) {
  if (!model.is_drude()) return {-1.0, 1.0};
  const cplx e = epsilon(model, omega);
  return {(k - kappa_m) / (k + kappa_m), (e * k - kappa_m) / (e * k + kappa_m)};
}

}  // namespace dyncp
