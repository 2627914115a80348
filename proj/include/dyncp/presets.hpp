#pragma once

#include <filesystem>
#include <map>
#include <string>

#include "dyncp/materials.hpp"

namespace dyncp {

/// SI constants and conversions between SI quantities and reduced units (c = 1, frequencies in
/// multiples of the atomic transition frequency, lengths in c / Omega, times in 1 / Omega).
namespace units {
inline constexpr double kHbarEvSeconds = 6.582119569e-16;  // eV s
inline constexpr double kSpeedOfLight = 299792458.0;       // m / s

double ev_to_angular(double energy_ev);
double angular_to_ev(double omega);
double wavelength_to_angular(double wavelength_m);
double reduced_frequency(double omega_si, double omega_atom_si);
double reduced_length(double length_m, double omega_atom_si);
double reduced_time(double time_s, double omega_atom_si);
}  // namespace units

struct MaterialPreset {
  std::string name;
  SurfaceKind kind = SurfaceKind::PerfectReflector;
  double plasma_energy_ev = 0.0;
  double relaxation_time_fs = 0.0;

  /// Model in SI angular frequencies (rad/s).
  SurfaceModel si_model() const;
  /// Model in reduced units for an atom with transition frequency omega_atom_si (rad/s).
  SurfaceModel reduced_model(double omega_atom_si) const;
};

struct AtomPreset {
  std::string name;
  double wavelength_nm = 0.0;
  double angular_frequency() const;
};

class PresetTable {
 public:
  /// Parses a JSON preset file. Throws PreconditionError on malformed content.
  static PresetTable load(const std::filesystem::path& path);
  /// Loads the file named by $DYNCP_PRESETS, or the preset file shipped with the sources.
  static PresetTable load_default();
  static std::filesystem::path default_path();

  /// Throws PreconditionError for unknown names.
  const MaterialPreset& material(const std::string& name) const;
  const AtomPreset& atom(const std::string& name) const;
  const std::map<std::string, MaterialPreset>& materials() const { return materials_; }
  const std::map<std::string, AtomPreset>& atoms() const { return atoms_; }
  const std::filesystem::path& source() const { return source_; }

 private:
  std::map<std::string, MaterialPreset> materials_;
  std::map<std::string, AtomPreset> atoms_;
  std::filesystem::path source_;
};

}  // namespace dyncp
