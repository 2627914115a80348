#pragma once

#include <complex>
#include <string>

namespace dyncp {

using cplx = std::complex<double>;

enum class SurfaceKind { Drude, PerfectReflector };
enum class Polarization { S, P };

/// Optical response of the half-space. Frequencies are in reduced units (multiples of the
/// atomic transition frequency) unless a caller deliberately works in SI.
class SurfaceModel {
 public:
  /// Throws PreconditionError unless plasma_frequency > 0 and damping_rate >= 0.
  static SurfaceModel drude(double plasma_frequency, double damping_rate);
  static SurfaceModel perfect();

  SurfaceKind kind() const { return kind_; }
  bool is_drude() const { return kind_ == SurfaceKind::Drude; }
  double plasma_frequency() const { return wp_; }
  double damping_rate() const { return gamma_; }
  /// omega_p / sqrt(2); zero for the perfect reflector.
  double surface_plasmon_frequency() const;

  /// Same model with frequencies divided by `unit` (e.g. SI rad/s to reduced units).
  SurfaceModel scaled(double unit) const;

  std::string describe() const;

 private:
  SurfaceModel(SurfaceKind kind, double wp, double gamma) : kind_(kind), wp_(wp), gamma_(gamma) {}
  SurfaceKind kind_;
  double wp_;
  double gamma_;
};

/// Drude permittivity 1 - wp^2 / (w (w + i gamma)).
/// Throws PoleError at w = 0 and UnsupportedOperation for the perfect reflector.
cplx epsilon(const SurfaceModel& model, cplx omega);

/// w^2 (1 - eps(w)) = w wp^2 / (w + i gamma); finite at w = 0.
cplx bulk_shift(const SurfaceModel& model, cplx omega);

/// Vacuum propagation constant sqrt(p^2 - w^2) with Re >= 0; on the real axis the
/// propagating branch is the limit from above (Im kappa <= 0 for w > 0).
cplx kappa(cplx omega, double p);

/// sqrt(p^2 - eps w^2) with the same branch rule as kappa().
cplx kappa_medium(const SurfaceModel& model, cplx omega, double p);

/// Fresnel amplitude for polarization `pol`. Perfect reflector: r_s = -1, r_p = 1.
/// Throws PoleError when |denominator| < 1e-12 |numerator|.
cplx reflection(const SurfaceModel& model, cplx omega, double p, Polarization pol);

struct FresnelPair {
  cplx rs;
  cplx rp;
};

/// Both amplitudes at a complex vacuum propagation constant `k` (p^2 = k^2 + w^2), with the
/// medium constant sqrt(k^2 + bulk_shift) on the principal branch unless `kappa_m` is given.
/// No pole-proximity check: callers on integration paths handle poles themselves.
FresnelPair fresnel_at_kappa(const SurfaceModel& model, cplx omega, cplx k);
FresnelPair fresnel_at_kappa(const SurfaceModel& model, cplx omega, cplx k, cplx kappa_m);

}  // namespace dyncp
