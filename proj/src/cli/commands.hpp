#pragma once

#include <optional>
#include <string>

#include "dyncp/cli.hpp"
#include "dyncp/potentials.hpp"

namespace dyncp::cli {

/// Physical setup shared by every command, in the units the user typed.
struct SetupArgs {
  std::string material = "gold";
  std::string atom = "rb780";
  std::optional<double> wavelength_nm;
  std::optional<double> plasma_energy_ev;
  std::optional<double> relaxation_time_fs;
  std::optional<double> z;     // c / Omega
  std::optional<double> z_nm;  // SI
  std::string presets;         // empty: default lookup
};

/// Setup resolved to reduced units, plus the SI values for the manifest.
struct Setup {
  SurfaceModel surface = SurfaceModel::perfect();
  double omega_si = 0.0;
  double z = 0.0;
  nlohmann::json describe() const;
};

Setup resolve(const SetupArgs& args, double default_z);

struct TimeGrid {
  double tmin = 0.0;
  double tmax = 40.0;
  double dt = 0.05;
  std::vector<double> build() const;
};

struct CommonArgs {
  unsigned threads = 0;
  std::string normalization = "reduced";  // reduced | static
  std::string closure = "shifted";        // shifted | plasmon-pole
};

PotentialOptions potential_options(const CommonArgs& common);
nlohmann::json tolerance_summary(const PotentialOptions& opts);

struct DressArgs {
  SetupArgs setup;
  TimeGrid grid;
  CommonArgs common;
  bool no_resonant = false;
};
CsvTable cmd_dress(const DressArgs& args, RunManifest& manifest);

struct DispersionArgs {
  SetupArgs setup;
  double pmin = 0.0;  // c p / w_p
  double pmax = 10.0;
  int points = 201;
  std::string map_output;  // optional |Im r_p| grid
  int map_p_points = 101;
  int map_omega_points = 101;
};
CsvTable cmd_dispersion(const DispersionArgs& args, RunManifest& manifest);

struct ResonantArgs {
  SetupArgs setup;
  TimeGrid grid;
  CommonArgs common;
  std::string branch = "lossy";  // lossy | lossless | nearfield
  double fit_tmin = 30.0;
  double fit_tmax = 100.0;
};
CsvTable cmd_resonant(const ResonantArgs& args, RunManifest& manifest);

struct PartialArgs {
  SetupArgs setup;
  TimeGrid grid;
  CommonArgs common;
  std::optional<double> ratio;            // Omega~ / Omega
  std::optional<double> dipole_magnitude_sq;  // |d~|^2 / |d|^2
  std::optional<double> dipole_overlap;       // d~ . d / |d|^2
};
CsvTable cmd_partial(const PartialArgs& args, RunManifest& manifest);

struct DecayArgs {
  SetupArgs setup;
  CommonArgs common;
  double zmin = 0.3;
  double zmax = 10.0;
  int nz = 12;
  double tau = 1.1;
  double window = 6.0;  // scan length in units of the estimate
  double dt = 0.01;
};
CsvTable cmd_decay_time(const DecayArgs& args, RunManifest& manifest);

}  // namespace dyncp::cli
