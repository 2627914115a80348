#include <cmath>

#include <gtest/gtest.h>

#include "dyncp/errors.hpp"
#include "dyncp/plasmon.hpp"

namespace dyncp {
namespace {

const SurfaceModel kGold = SurfaceModel::drude(5.5991006017408615, 0.021794174831175753);

TEST(Lossless, Origin) {
  const PlasmonMode m = dispersion_lossless(kGold, 0.0);
  EXPECT_EQ(m.omega_bar, cplx(0.0));
  EXPECT_EQ(m.kappa_bar, cplx(0.0));
}

TEST(Lossless, SurfacePlasmonMomentumRow) {
  const double ws = kGold.surface_plasmon_frequency();
  const PlasmonMode m = dispersion_lossless(kGold, ws);
  EXPECT_NEAR(m.omega_bar.real() / ws, -std::sqrt(2.0 - std::sqrt(2.0)), 1e-12);
  EXPECT_NEAR(m.omega_bar.real() / ws, -0.7654, 1e-4);
}

TEST(Lossless, ApproachesSurfacePlasmonFrequency) {
  const double ws = kGold.surface_plasmon_frequency();
  EXPECT_NEAR(dispersion_lossless(kGold, 1e4 * ws).omega_bar.real(), -ws, 1e-6 * ws);
}

TEST(Lossless, BelowLightConeAndMonotone) {
  double last = 0.0;
  for (double p = 0.01; p < 100.0; p *= 1.3) {
    const double w = std::abs(dispersion_lossless(kGold, p).omega_bar);
    EXPECT_LT(w, p);
    EXPECT_GT(w, last);
    last = w;
  }
}

TEST(Lossless, PerfectReflectorUnsupported) {
  EXPECT_THROW(dispersion_lossless(SurfaceModel::perfect(), 1.0), UnsupportedOperation);
}

TEST(Lossy, SatisfiesPoleCondition) {
  for (double p : {0.3, 1.0, 5.0, 40.0}) {
    const PlasmonMode m = dispersion_lossy(kGold, p);
    EXPECT_LT(m.omega_bar.real(), 0.0);
    EXPECT_LE(m.omega_bar.imag(), 0.0);
    const cplx eps = epsilon(kGold, m.omega_bar);
    EXPECT_LE(std::abs(eps * m.kappa_bar + kappa_medium(kGold, m.omega_bar, p)), 1e-8 * std::abs(eps * m.kappa_bar))
        << p;
  }
}

TEST(Lossy, CloseToLosslessAtModerateMomentum) {
  const double wp = kGold.plasma_frequency();
  const double ws = kGold.surface_plasmon_frequency();
  for (double p = 0.05 * wp; p <= 10.0 * wp; p *= 1.5) {
    EXPECT_LE(std::abs(dispersion_lossy(kGold, p).omega_bar.real() - dispersion_lossless(kGold, p).omega_bar.real()),
              1e-2 * ws);
  }
}

TEST(Lossy, VanishingDampingMatchesLossless) {
  const SurfaceModel tiny = SurfaceModel::drude(kGold.plasma_frequency(), 1e-9 * kGold.plasma_frequency());
  for (double p : {0.5, 3.0, 20.0}) {
    const cplx a = dispersion_lossy(tiny, p).omega_bar;
    const cplx b = dispersion_lossless(tiny, p).omega_bar;
    EXPECT_LE(std::abs(a - b), 1e-6 * std::abs(b));
  }
}

TEST(Lossy, LargeMomentumPole) {
  const double ws = kGold.surface_plasmon_frequency();
  const double g = kGold.damping_rate();
  const cplx pole = near_field_pole(kGold);
  EXPECT_NEAR(pole.real(), -ws, 1e-14);
  EXPECT_NEAR(pole.imag(), -0.5 * g, 1e-14);
  const cplx far = dispersion_lossy(kGold, 1e3 * kGold.plasma_frequency()).omega_bar;
  EXPECT_LE(std::abs(far - pole), 10.0 * g * g / ws);
  EXPECT_NEAR(std::abs(near_field_pole(SurfaceModel::drude(2.0, 0.0)) + std::sqrt(2.0)), 0.0, 1e-15);
}

TEST(Lossy, RequiresDamping) { EXPECT_THROW(dispersion_lossy(SurfaceModel::drude(2.0, 0.0), 1.0), PreconditionError); }

TEST(Residue, MatchesContourLimitOfReflection) {
  for (double p : {0.2, 1.0, 8.0}) {
    const PlasmonMode m = dispersion_lossy(kGold, p);
    const double h = 1e-6 * std::abs(m.omega_bar);
    cplx avg = 0.0;
    const int n = 64;
    for (int k = 0; k < n; ++k) {
      const cplx step = h * std::exp(cplx(0.0, 2.0 * M_PI * k / n));
      avg += reflection(kGold, m.omega_bar + step, p, Polarization::P) * step;
    }
    avg /= static_cast<double>(n);
    ASSERT_TRUE(m.residue.has_value());
    EXPECT_LE(std::abs(avg - *m.residue), 1e-5 * std::abs(*m.residue)) << p;
  }
}

TEST(Residue, NearFieldLimit) {
  const double ws = kGold.surface_plasmon_frequency();
  const PlasmonMode m = dispersion_lossy(kGold, 1e4 * ws);
  EXPECT_NEAR(m.residue->real(), 0.5 * ws, 1e-3 * ws);
}

TEST(Branch, ContinuousResidues) {
  const PlasmonBranch br(kGold, 50.0);
  cplx last = br.mode(br.p_min() * 1.01).residue.value();
  for (double p = br.p_min() * 1.01; p < 50.0; p *= 1.05) {
    const cplx r = br.mode(p).residue.value();
    EXPECT_LE(std::abs(r - last), 0.2 * std::abs(r) + 1e-12) << p;
    last = r;
  }
}

TEST(Branch, ScanMatchesPointwiseRoots) {
  const std::vector<double> grid{8.0, 0.5, 2.0, 30.0};
  const auto modes = scan_lossy(kGold, grid);
  ASSERT_EQ(modes.size(), grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    EXPECT_EQ(modes[i].p, grid[i]);
    EXPECT_LE(std::abs(modes[i].omega_bar - dispersion_lossy(kGold, grid[i]).omega_bar), 1e-10);
  }
}

TEST(ReflectionMap, GridShape) {
  const auto map = reflection_map(kGold, 10.0, 5, -6.0, 0.0, 4);
  EXPECT_EQ(map.size(), 20u);
  for (const auto& pt : map) EXPECT_GE(pt.abs_im_rp, 0.0);
}

}  // namespace
}  // namespace dyncp
