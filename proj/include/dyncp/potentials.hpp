#pragma once

#include <complex>
#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "dyncp/greens.hpp"
#include "dyncp/materials.hpp"

namespace dyncp {

/// Two-level atom at distance z from the surface. All quantities in reduced units; the
/// transition frequency `omega` is normally 1 but may differ (e.g. after a Stark shift).
struct AtomSurfaceConfig {
  double omega = 1.0;
  DipoleSpec dipole = DipoleSpec::isotropic();
  SurfaceModel surface = SurfaceModel::perfect();
  double z = 1.0;

  /// Throws PreconditionError unless z > 0, omega > 0 and the dipole is isotropic.
  void validate() const;
};

/// How the part of the real-frequency integral that cannot be rotated onto the positive
/// imaginary axis (ct > 2z) is evaluated.
enum class ContourClosure {
  /// Finite real segment [-X, 0] plus a vertical leg Re w = -X beyond the bulk plasma
  /// frequency. Exact.
  ShiftedLeg,
  /// Negative imaginary axis plus the surface-plasmon residue term only.
  PlasmonPole,
};

enum class ResonantBranch { Lossy, Lossless };

struct PotentialOptions {
  double imag_axis_rel_tol = 1e-9;
  double green_rel_tol = 1e-10;
  double momentum_rel_tol = 1e-7;
  double oracle_rel_tol = 1e-8;
  /// Relative half-width of the window around ct = 2z that is flagged.
  double light_cone_window = 0.05;
  ContourClosure closure = ContourClosure::ShiftedLeg;
  ResonantBranch branch = ResonantBranch::Lossy;
};

struct DynamicValue {
  double value = 0.0;
  double error_bound = 0.0;
  bool near_light_cone = false;
};

/// Frequency integral D(t) = int_0^inf dw/2pi Im G(w) 2 cos((nu + w) t) / (mu + w), evaluated
/// on deformed contours. u_dyn is D with nu = mu = Omega; the partial-dressing terms use other
/// (nu, mu) pairs. Tables are built lazily and shared; safe for concurrent queries.
class DynamicPotential {
 public:
  explicit DynamicPotential(AtomSurfaceConfig cfg, PotentialOptions options = {});
  ~DynamicPotential();
  DynamicPotential(DynamicPotential&&) noexcept;
  DynamicPotential& operator=(DynamicPotential&&) noexcept;

  const AtomSurfaceConfig& config() const;
  const PotentialOptions& options() const;

  /// -int dxi/2pi G(i xi) 2 mu / (mu^2 + xi^2); mu defaults to the transition frequency.
  double u_static(std::optional<double> mu = std::nullopt) const;

  DynamicValue u_dyn(double t) const;
  DynamicValue u_dyn_oracle(double t) const;

  /// D(t) for arbitrary phase frequency nu and denominator frequency mu.
  DynamicValue frequency_integral(double t, double nu, double mu) const;
  DynamicValue frequency_integral_oracle(double t, double nu, double mu) const;

  /// Surface-plasmon residue term for any t >= 0 (the potential includes it only for ct > 2z).
  /// Requires a Drude surface.
  double delta_u_res(double t) const;
  /// Complex amplitude A(t) with delta_u_res = Re A(t).
  std::complex<double> delta_u_res_amplitude(double t) const;

  bool near_light_cone(double t) const;

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

double u_static(const AtomSurfaceConfig& cfg, const PotentialOptions& options = {});
DynamicValue u_dyn_contour(const AtomSurfaceConfig& cfg, double t, const PotentialOptions& options = {});
DynamicValue u_dyn_oracle(const AtomSurfaceConfig& cfg, double t, const PotentialOptions& options = {});
/// Throws PreconditionError for t < 0.
double delta_u_res(const AtomSurfaceConfig& cfg, double t, const PotentialOptions& options = {});
/// Near-field pole term d^2 w_sp / (48 pi z^3) Re[e^{i(Omega - w_inf) t} / (Omega - w_inf)].
double delta_u_res_near_field(const AtomSurfaceConfig& cfg, double t);

enum class Normalization { Reduced, RelativeToStatic };

struct PotentialSeries {
  std::vector<double> time_grid;
  double u_stat = 0.0;
  std::vector<double> u_dyn;
  std::vector<double> delta_u_res;
  std::optional<std::vector<double>> delta_u_partial;
  std::vector<double> total;
  std::vector<bool> light_cone_flag;
  Normalization normalization = Normalization::Reduced;
  /// |U_stat| of the reference configuration, used by normalized().
  double reference_scale = 1.0;

  /// Copy with every energy divided by reference_scale.
  PotentialSeries normalized() const;
};

struct StarkShift {
  double new_omega;
};

/// Dipole change d -> d~ for isotropic dipoles, described by |d~|^2 and the overlap d~ . d.
struct DipoleChange {
  double new_magnitude_sq;
  double overlap;
};

struct SeriesOptions {
  PotentialOptions potential{};
  unsigned threads = 0;  // 0: hardware concurrency
  bool with_resonant = true;
};

/// Bare dressing: u_stat + u_dyn(t), with the plasmon term as a separate column.
PotentialSeries dress_series(const AtomSurfaceConfig& cfg, const std::vector<double>& times,
                             const SeriesOptions& options = {});

/// Partial dressing after Omega -> Omega~: total = U_stat(Omega~) + U_dyn(Omega~, t) + dU_p(t).
PotentialSeries u_partial_stark(const AtomSurfaceConfig& cfg, const StarkShift& quench,
                                const std::vector<double>& times, const SeriesOptions& options = {});

/// Partial dressing after d -> d~: total = U_stat(d~) + d~.(d~ - d) int dw/pi Im G cos(..)/(Omega + w).
PotentialSeries u_partial_dipole(const AtomSurfaceConfig& cfg, const DipoleChange& quench,
                                 const std::vector<double>& times, const SeriesOptions& options = {});

struct DecayTimeResult {
  double z = 0.0;
  double t_decay_numeric = 0.0;
  double t_decay_estimate = 0.0;
  double tau = 1.1;
};

struct DecayTimeOptions {
  double tau = 1.1;
  /// Allowed relative rise between successive envelope maxima before the fit is rejected.
  double monotone_tolerance = 0.1;
  PotentialOptions potential{};
  unsigned threads = 0;
};

/// tau pi sqrt(z / w_sp).
double decay_time_estimate(const SurfaceModel& model, double z, double tau);

/// 1/e time of the envelope of the residue term delta_u_res(t), measured from the switch-on t = 0.
/// `times` is the scan grid: it starts at 0 and reaches 5 x the estimate. Throws FitError for an
/// envelope that rises before the 1/e crossing.
DecayTimeResult decay_time(const AtomSurfaceConfig& cfg, const std::vector<double>& times,
                           const DecayTimeOptions& options = {});

/// Local maxima of |values| and a shape-preserving (monotone cubic) interpolant through them.
struct Envelope {
  std::vector<double> t;
  std::vector<double> peak;
  double operator()(double at) const;
};
Envelope envelope_of(const std::vector<double>& times, const std::vector<double>& values);

/// Runs fn(i) for i in [0, n) on `threads` workers (0: hardware concurrency).
void parallel_for(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn);

}  // namespace dyncp
