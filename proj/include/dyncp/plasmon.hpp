#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "dyncp/materials.hpp"

namespace dyncp {

/// Point on the surface-plasmon branch.
struct PlasmonMode {
  double p = 0.0;
  cplx omega_bar{};
  cplx kappa_bar{};
  std::optional<cplx> residue;
  int iterations = 0;
};

/// Closed-form lossless branch (gamma -> 0). Throws UnsupportedOperation for a perfect reflector.
PlasmonMode dispersion_lossless(const SurfaceModel& model, double p);

/// Root of eps(w) kappa + kappa_m = 0 near `seed` (default: the lossless root shifted by
/// -i gamma/2). Throws RootError on nonconvergence and BranchError if the root leaves the
/// quadrant Re w < 0, Im w <= 0. Requires gamma > 0.
PlasmonMode dispersion_lossy(const SurfaceModel& model, double p, std::optional<cplx> seed = std::nullopt);

/// Residue of r_p at a dispersion root, (eps k - k_m) / d/dw (eps k + k_m), with analytic
/// derivatives evaluated on the dispersion shell. Tends to omega_sp / 2 at large p. Throws PoleError when the derivative vanishes.
cplx residue_rp(const SurfaceModel& model, cplx omega, double p);

/// Dispersion residual eps(w) kappa(w, p) + kappa_m(w, p) and its w-derivative.
cplx dispersion_residual(const SurfaceModel& model, cplx omega, double p);
cplx dispersion_residual_derivative(const SurfaceModel& model, cplx omega, double p);

/// Large-wavevector pole -omega_sp - i gamma / 2.
cplx near_field_pole(const SurfaceModel& model);

/// Lossy branch over [0, p_max], built by continuation from large to small p on a geometric
/// grid. Queries at arbitrary p are refined from the nearest tabulated root. Owned by a single
/// worker; build one per thread for parallel scans.
class PlasmonBranch {
 public:
  PlasmonBranch(const SurfaceModel& model, double p_max, int points = 600);

  /// Converged mode (residue included) at p in (0, p_max].
  PlasmonMode mode(double p) const;
  const std::vector<PlasmonMode>& table() const { return table_; }
  double p_min() const { return table_.empty() ? 0.0 : table_.back().p; }

 private:
  SurfaceModel model_;
  std::vector<PlasmonMode> table_;  // descending p
};

/// Modes on a caller-supplied grid, evaluated by continuation from the largest p down.
/// Results are returned in the order of `p_grid`.
std::vector<PlasmonMode> scan_lossy(const SurfaceModel& model, const std::vector<double>& p_grid);

struct ReflectionMapPoint {
  double p;
  double omega;
  double abs_im_rp;
};

/// |Im r_p(w, p)| on a rectangular (p, w) grid of real values (background of the dispersion map).
std::vector<ReflectionMapPoint> reflection_map(const SurfaceModel& model, double p_max, int p_points,
                                               double omega_min, double omega_max, int omega_points);

}  // namespace dyncp
