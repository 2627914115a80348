#include "dyncp/cli.hpp"

#include <algorithm>
#include <chrono>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "cli/commands.hpp"
#include "dyncp/errors.hpp"

namespace dyncp::cli {

std::string version() { return DYNCP_VERSION; }

namespace {

struct OutputArgs {
  std::string output = "-";
  std::string manifest;  // default: <output>.manifest.json
};

void add_setup(CLI::App* app, SetupArgs& s) {
  app->add_option("--material", s.material, "Material preset (gold, perfect, ...)");
  app->add_option("--atom", s.atom, "Atom preset defining the transition frequency");
  app->add_option("--wavelength-nm", s.wavelength_nm, "Transition wavelength in nm (overrides --atom)");
  app->add_option("--plasma-ev", s.plasma_energy_ev, "Override the plasma energy (eV)");
  app->add_option("--relaxation-fs", s.relaxation_time_fs, "Override the relaxation time (fs)");
  app->add_option("--z", s.z, "Atom-surface distance in c/Omega");
  app->add_option("--z-nm", s.z_nm, "Atom-surface distance in nm");
  app->add_option("--presets", s.presets, "Preset file (default: $DYNCP_PRESETS or the shipped table)");
}

void add_grid(CLI::App* app, TimeGrid& g) {
  app->add_option("--tmin", g.tmin, "First time (1/Omega)");
  app->add_option("--tmax", g.tmax, "Last time (1/Omega)");
  app->add_option("--dt", g.dt, "Time step (1/Omega)");
}

void add_common(CLI::App* app, CommonArgs& c) {
  app->add_option("--threads", c.threads, "Worker threads (0: all cores)");
  app->add_option("--normalization", c.normalization, "reduced or static")
      ->check(CLI::IsMember({"reduced", "static"}));
  app->add_option("--closure", c.closure, "Contour closure for ct > 2z: shifted or plasmon-pole")
      ->check(CLI::IsMember({"shifted", "plasmon-pole"}));
}

void add_output(CLI::App* app, OutputArgs& o) {
  app->add_option("-o,--output", o.output, "CSV output file ('-' for stdout)");
  app->add_option("--manifest", o.manifest, "Manifest output file (default: <output>.manifest.json)");
}

int emit(const CsvTable& table, RunManifest& manifest, const OutputArgs& o, std::ostream& out) {
  CsvTable t = table;
  t.metadata.insert(t.metadata.begin(), fmt::format("dyncp {} {}", version(), manifest.command));
  t.metadata.push_back("manifest: " + manifest.to_json().dump());
  if (o.output == "-") {
    t.write(out);
  } else {
    std::ofstream f(o.output);
    if (!f) throw PreconditionError("cannot write " + o.output);
    t.write(f);
  }
  const std::string mpath = !o.manifest.empty() ? o.manifest : (o.output == "-" ? "" : o.output + ".manifest.json");
  if (!mpath.empty()) {
    std::ofstream f(mpath);
    if (!f) throw PreconditionError("cannot write " + mpath);
    f << manifest.to_json().dump(2) << '\n';
  }
  return kSuccess;
}

// Arguments without output destinations, so a replay can redirect them.
std::vector<std::string> replayable(const std::vector<std::string>& args) {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < args.size(); ++i) {
    const std::string& a = args[i];
    if (a == "-o" || a == "--output" || a == "--manifest") {
      ++i;
      continue;
    }
    if (a.rfind("--output=", 0) == 0 || a.rfind("--manifest=", 0) == 0) continue;
    out.push_back(a);
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dynamic Casimir-Polder potential of a two-level atom near a planar surface", "dyncp"};
  app.require_subcommand(1);
  app.set_version_flag("--version", version());

  OutputArgs output;
  DressArgs dress;
  DispersionArgs disp;
  ResonantArgs res;
  res.grid = {0.0, 100.0, 0.02};
  PartialArgs part;
  DecayArgs decay;
  std::string replay_path;

  auto* c_dress = app.add_subcommand("dress", "Bare dressing: U_stat + U_dyn(t) after switching on the coupling");
  add_setup(c_dress, dress.setup);
  add_grid(c_dress, dress.grid);
  add_common(c_dress, dress.common);
  add_output(c_dress, output);
  c_dress->add_flag("--no-resonant", dress.no_resonant, "Skip the surface-plasmon column");

  auto* c_disp = app.add_subcommand("dispersion", "Surface-plasmon dispersion, lossy and lossless branches");
  add_setup(c_disp, disp.setup);
  add_output(c_disp, output);
  c_disp->add_option("--pmin", disp.pmin, "Smallest c p / w_p");
  c_disp->add_option("--pmax", disp.pmax, "Largest c p / w_p");
  c_disp->add_option("--points", disp.points, "Number of momenta");
  c_disp->add_option("--map-output", disp.map_output, "Also write |Im r_p| on a (p, omega) grid");
  c_disp->add_option("--map-p-points", disp.map_p_points);
  c_disp->add_option("--map-omega-points", disp.map_omega_points);

  auto* c_res = app.add_subcommand("resonant", "Surface-plasmon contribution and its envelope");
  add_setup(c_res, res.setup);
  add_grid(c_res, res.grid);
  add_common(c_res, res.common);
  add_output(c_res, output);
  c_res->add_option("--branch", res.branch, "lossy, lossless or nearfield")
      ->check(CLI::IsMember({"lossy", "lossless", "nearfield"}));
  c_res->add_option("--fit-tmin", res.fit_tmin, "Start of the power-law fit window");
  c_res->add_option("--fit-tmax", res.fit_tmax, "End of the power-law fit window");

  auto* c_part = app.add_subcommand("partial", "Partial dressing after a sudden change of Omega or d");
  add_setup(c_part, part.setup);
  add_grid(c_part, part.grid);
  add_common(c_part, part.common);
  add_output(c_part, output);
  c_part->add_option("--ratio", part.ratio, "New transition frequency Omega~/Omega");
  c_part->add_option("--dipole-magnitude", part.dipole_magnitude_sq, "|d~|^2 / |d|^2");
  c_part->add_option("--dipole-overlap", part.dipole_overlap, "d~ . d / |d|^2");

  auto* c_decay = app.add_subcommand("decay-time", "1/e decay time of the resonant term versus distance");
  add_setup(c_decay, decay.setup);
  add_common(c_decay, decay.common);
  add_output(c_decay, output);
  c_decay->add_option("--zmin", decay.zmin);
  c_decay->add_option("--zmax", decay.zmax);
  c_decay->add_option("--nz", decay.nz, "Number of distances (geometric grid)");
  c_decay->add_option("--tau", decay.tau, "Prefactor of the analytic estimate");
  c_decay->add_option("--window", decay.window, "Scan length in estimated decay times (>= 5)");
  c_decay->add_option("--dt", decay.dt, "Scan time step");

  auto* c_replay = app.add_subcommand("replay", "Rerun the command recorded in a manifest");
  c_replay->add_option("manifest-file", replay_path, "Manifest file to replay")->required()->check(CLI::ExistingFile);
  add_output(c_replay, output);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (c_replay->parsed()) {
      std::ifstream in(replay_path);
      const RunManifest m = RunManifest::from_json(nlohmann::json::parse(in));
      std::vector<std::string> again = m.arguments;
      again.insert(again.end(), {"--output", output.output});
      if (!output.manifest.empty()) again.insert(again.end(), {"--manifest", output.manifest});
      return run(again, out, err);
    }

    RunManifest manifest;
    manifest.arguments = replayable(args);
    manifest.tool_version = version();
    const auto start = std::chrono::steady_clock::now();
    CsvTable table;
    if (c_dress->parsed()) {
      manifest.command = "dress";
      table = cmd_dress(dress, manifest);
    } else if (c_disp->parsed()) {
      manifest.command = "dispersion";
      table = cmd_dispersion(disp, manifest);
    } else if (c_res->parsed()) {
      manifest.command = "resonant";
      table = cmd_resonant(res, manifest);
    } else if (c_part->parsed()) {
      manifest.command = "partial";
      table = cmd_partial(part, manifest);
    } else if (c_decay->parsed()) {
      manifest.command = "decay-time";
      table = cmd_decay_time(decay, manifest);
    }
    manifest.elapsed_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return emit(table, manifest, output, out);
  } catch (const PreconditionError& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const UnsupportedOperation& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const nlohmann::json::exception& e) {
    err << "usage error: " << e.what() << '\n';
    return kUsage;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNonconvergence;
  }
}

}  // namespace dyncp::cli
