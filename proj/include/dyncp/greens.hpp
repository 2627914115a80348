#pragma once

#include <array>
#include <complex>

#include "dyncp/materials.hpp"

namespace dyncp {

enum class Orientation { Isotropic, AxisAligned };

/// Transition dipole: squared magnitude and orientation class.
struct DipoleSpec {
  double magnitude_sq = 1.0;
  Orientation orientation = Orientation::Isotropic;
  std::array<double, 3> axis{0.0, 0.0, 1.0};

  static DipoleSpec isotropic(double magnitude_sq = 1.0);
  static DipoleSpec axis_aligned(double magnitude_sq, const std::array<double, 3>& axis);

  /// Throws PreconditionError for magnitude_sq <= 0 or a non-unit axis.
  void validate() const;
  /// d^2 (1 - n_z^2); 2 d^2 / 3 for isotropic dipoles.
  double tangential_weight() const;
  /// d^2 n_z^2; d^2 / 3 for isotropic dipoles.
  double normal_weight() const;
};

/// d_m d_n G_mn(r, r, w) for the reflected part of the Green tensor.
struct GreenTrace {
  cplx value;
  double z;
  cplx omega;
};

struct GreenOptions {
  double rel_tol = 1e-9;
  int max_subdivisions = 2000;
};

/// Weyl-expansion quadrature of the reflected Green tensor projected on the dipole.
/// Requires z > 0 and Im w >= 0. Throws QuadratureError when the quadrature stalls.
GreenTrace green_reflected(const SurfaceModel& model, const DipoleSpec& dipole, double z, cplx omega,
                           const GreenOptions& options = {});

/// Perfect reflector in closed form; isotropic value is (2 - 2iu - u^2) e^{iu} d^2 / (48 pi z^3),
/// u = 2 w z.
GreenTrace green_perfect_closed(const DipoleSpec& dipole, double z, cplx omega);

/// Large-wavevector asymptote (d^2 + d_z^2) / (32 pi z^3) * (eps - 1) / (eps + 1).
/// The perfect reflector substitutes r_p = 1.
GreenTrace green_near_field(const SurfaceModel& model, const DipoleSpec& dipole, double z, cplx omega);

/// Envelope g(w) = G(w) e^{-2iwz}, bounded along rays in the upper half-plane.
///
/// Below the real axis the value is the analytic continuation from above, obtained by keeping
/// the medium root on the sheet reached continuously along the integration path. This is
/// the continuation along vertical lines Re w = const provided no reflection pole crosses the
/// path; the contour code only uses it for |Re w| beyond the bulk plasma frequency.
cplx green_envelope(const SurfaceModel& model, const DipoleSpec& dipole, double z, cplx omega,
                    const GreenOptions& options = {});

/// Envelope e^{-2 eta z} G(-i eta - 0) on the negative imaginary axis approached from Re w < 0.
/// The surface-plasmon pole that sits on the integration path for eta > gamma is handled as a
/// principal value plus the half residue selected by the side of approach.
cplx green_leg_envelope(const SurfaceModel& model, const DipoleSpec& dipole, double z, double eta,
                        const GreenOptions& options = {});

}  // namespace dyncp
