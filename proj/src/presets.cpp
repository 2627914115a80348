#include "dyncp/presets.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <numbers>

#include <json.hpp>

#include "dyncp/errors.hpp"

namespace dyncp {

namespace units {

double ev_to_angular(double energy_ev) { return energy_ev / kHbarEvSeconds; }
double angular_to_ev(double omega) { return omega * kHbarEvSeconds; }
double wavelength_to_angular(double wavelength_m) {
  if (!(wavelength_m > 0.0)) throw PreconditionError("wavelength must be positive");
  return 2.0 * std::numbers::pi * kSpeedOfLight / wavelength_m;
}
double reduced_frequency(double omega_si, double omega_atom_si) { return omega_si / omega_atom_si; }
double reduced_length(double length_m, double omega_atom_si) {
  return length_m * omega_atom_si / kSpeedOfLight;
}
double reduced_time(double time_s, double omega_atom_si) { return time_s * omega_atom_si; }

}  // namespace units

SurfaceModel MaterialPreset::si_model() const {
  if (kind == SurfaceKind::PerfectReflector) return SurfaceModel::perfect();
  const double gamma = relaxation_time_fs > 0.0 ? 1.0 / (relaxation_time_fs * 1e-15) : 0.0;
  return SurfaceModel::drude(units::ev_to_angular(plasma_energy_ev), gamma);
}

SurfaceModel MaterialPreset::reduced_model(double omega_atom_si) const {
  return si_model().scaled(omega_atom_si);
}

double AtomPreset::angular_frequency() const {
  return units::wavelength_to_angular(wavelength_nm * 1e-9);
}

PresetTable PresetTable::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open preset file " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError("malformed preset file " + path.string() + ": " + e.what());
  }

  PresetTable table;
  table.source_ = path;
  try {
    const nlohmann::json materials = doc.value("materials", nlohmann::json::object());
    const nlohmann::json atoms = doc.value("atoms", nlohmann::json::object());
    for (const auto& [name, entry] : materials.items()) {
      MaterialPreset m;
      m.name = name;
      const std::string kind = entry.at("kind").get<std::string>();
      if (kind == "drude") {
        m.kind = SurfaceKind::Drude;
        m.plasma_energy_ev = entry.at("plasma_energy_eV").get<double>();
        m.relaxation_time_fs = entry.value("relaxation_time_fs", 0.0);
        m.si_model();  // validates the parameters
      } else if (kind == "perfect") {
        m.kind = SurfaceKind::PerfectReflector;
      } else {
        throw PreconditionError("unknown material kind '" + kind + "' for preset " + name);
      }
      table.materials_.emplace(name, m);
    }
    for (const auto& [name, entry] : atoms.items()) {
      AtomPreset a;
      a.name = name;
      a.wavelength_nm = entry.at("wavelength_nm").get<double>();
      if (!(a.wavelength_nm > 0.0)) throw PreconditionError("atom preset " + name + " needs a positive wavelength");
      table.atoms_.emplace(name, a);
    }
  } catch (const nlohmann::json::exception& e) {
    throw PreconditionError("malformed preset entry in " + path.string() + ": " + e.what());
  }
  return table;
}

std::filesystem::path PresetTable::default_path() {
  if (const char* env = std::getenv("DYNCP_PRESETS"); env != nullptr && *env != '\0') return env;
  return DYNCP_DEFAULT_PRESETS;
}

PresetTable PresetTable::load_default() { return load(default_path()); }

const MaterialPreset& PresetTable::material(const std::string& name) const {
  const auto it = materials_.find(name);
  if (it == materials_.end()) throw PreconditionError("unknown material preset '" + name + "'");
  return it->second;
}

const AtomPreset& PresetTable::atom(const std::string& name) const {
  const auto it = atoms_.find(name);
  if (it == atoms_.end()) throw PreconditionError("unknown atom preset '" + name + "'");
  return it->second;
}

}  // namespace dyncp
