#include "cli/commands.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>

#include <fmt/format.h>

#include "dyncp/errors.hpp"
#include "dyncp/plasmon.hpp"
#include "dyncp/presets.hpp"

namespace dyncp::cli {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<std::string> setup_metadata(const Setup& s) {
  return {fmt::format("surface: {}", s.surface.describe()), fmt::format("z: {} c/Omega", s.z),
          fmt::format("omega_si: {} rad/s", s.omega_si)};
}

}  // namespace

nlohmann::json Setup::describe() const {
  nlohmann::json j;
  j["omega_si_rad_per_s"] = omega_si;
  j["wavelength_nm"] = 2.0 * std::numbers::pi * units::kSpeedOfLight / omega_si * 1e9;
  j["z_reduced"] = z;
  j["z_m"] = z * units::kSpeedOfLight / omega_si;
  j["surface"] = surface.is_drude() ? "drude" : "perfect";
  if (surface.is_drude()) {
    j["plasma_frequency_reduced"] = surface.plasma_frequency();
    j["damping_rate_reduced"] = surface.damping_rate();
    j["plasma_energy_eV"] = units::angular_to_ev(surface.plasma_frequency() * omega_si);
    j["relaxation_time_fs"] =
        surface.damping_rate() > 0.0 ? 1e15 / (surface.damping_rate() * omega_si) : std::numeric_limits<double>::infinity();
  }
  return j;
}

Setup resolve(const SetupArgs& args, double default_z) {
  const PresetTable table = args.presets.empty() ? PresetTable::load_default() : PresetTable::load(args.presets);
  Setup s;
  if (args.wavelength_nm) {
    if (!(*args.wavelength_nm > 0.0)) throw PreconditionError("--wavelength-nm must be positive");
    s.omega_si = units::wavelength_to_angular(*args.wavelength_nm * 1e-9);
  } else {
    s.omega_si = table.atom(args.atom).angular_frequency();
  }
  MaterialPreset m = table.material(args.material);
  if (args.plasma_energy_ev || args.relaxation_time_fs) {
    if (m.kind != SurfaceKind::Drude) throw PreconditionError("Drude overrides need a Drude material");
    if (args.plasma_energy_ev) m.plasma_energy_ev = *args.plasma_energy_ev;
    if (args.relaxation_time_fs) m.relaxation_time_fs = *args.relaxation_time_fs;
  }
  s.surface = m.reduced_model(s.omega_si);
  if (args.z && args.z_nm) throw PreconditionError("give either --z or --z-nm, not both");
  s.z = args.z_nm ? units::reduced_length(*args.z_nm * 1e-9, s.omega_si) : args.z.value_or(default_z);
  if (!(s.z > 0.0) || !std::isfinite(s.z)) throw PreconditionError("distance z must be positive");
  return s;
}

std::vector<double> TimeGrid::build() const {
  if (!(dt > 0.0)) throw PreconditionError("--dt must be positive");
  if (!(tmin >= 0.0) || !(tmax >= tmin)) throw PreconditionError("need 0 <= tmin <= tmax");
  const auto n = static_cast<std::size_t>(std::floor((tmax - tmin) / dt + 1e-9));
  if (n > 10'000'000) throw PreconditionError("time grid too large");
  std::vector<double> out;
  out.reserve(n + 1);
  for (std::size_t i = 0; i <= n; ++i) out.push_back(tmin + dt * static_cast<double>(i));
  return out;
}

PotentialOptions potential_options(const CommonArgs& common) {
  PotentialOptions o;
  if (common.closure == "plasmon-pole") o.closure = ContourClosure::PlasmonPole;
  return o;
}

nlohmann::json tolerance_summary(const PotentialOptions& o) {
  return {{"imag_axis_rel_tol", o.imag_axis_rel_tol},
          {"green_rel_tol", o.green_rel_tol},
          {"momentum_rel_tol", o.momentum_rel_tol},
          {"oracle_rel_tol", o.oracle_rel_tol},
          {"light_cone_window", o.light_cone_window},
          {"closure", o.closure == ContourClosure::ShiftedLeg ? "shifted" : "plasmon-pole"}};
}

CsvTable cmd_dress(const DressArgs& args, RunManifest& manifest) {
  const Setup setup = resolve(args.setup, 10.0);
  AtomSurfaceConfig cfg;
  cfg.surface = setup.surface;
  cfg.z = setup.z;
  SeriesOptions opts;
  opts.potential = potential_options(args.common);
  opts.threads = args.common.threads;
  opts.with_resonant = !args.no_resonant;
  PotentialSeries s = dress_series(cfg, args.grid.build(), opts);
  if (args.common.normalization == "static") s = s.normalized();

  manifest.parameters["setup"] = setup.describe();
  manifest.tolerances = tolerance_summary(opts.potential);
  manifest.results["u_stat"] = s.u_stat;

  CsvTable t;
  t.metadata = setup_metadata(setup);
  t.metadata.push_back("scenario: bare dressing");
  t.metadata.push_back(fmt::format("normalization: {}", args.common.normalization == "static" ? "|U_stat|" : "reduced"));
  t.metadata.push_back("delta_u_partial: not applicable");
  t.columns = {"t", "u_stat", "u_dyn", "delta_u_res", "delta_u_partial", "total", "light_cone"};
  for (std::size_t i = 0; i < s.time_grid.size(); ++i) {
    t.rows.push_back({s.time_grid[i], s.u_stat, s.u_dyn[i], s.delta_u_res[i], kNaN, s.total[i],
                      s.light_cone_flag[i] ? 1.0 : 0.0});
  }
  return t;
}

CsvTable cmd_dispersion(const DispersionArgs& args, RunManifest& manifest) {
  const Setup setup = resolve(args.setup, 1.0);
  const SurfaceModel& m = setup.surface;
  if (!m.is_drude()) throw UnsupportedOperation("dispersion needs a Drude material");
  if (args.points < 2 || !(args.pmin >= 0.0) || !(args.pmax > args.pmin)) {
    throw PreconditionError("need 0 <= pmin < pmax and at least 2 points");
  }
  const double wp = m.plasma_frequency();
  std::vector<double> ps;
  for (int i = 0; i < args.points; ++i) ps.push_back(wp * (args.pmin + (args.pmax - args.pmin) * i / (args.points - 1)));

  std::vector<double> positive;
  for (double p : ps) {
    if (p > 0.0) positive.push_back(p);
  }
  std::vector<PlasmonMode> lossy;
  const bool have_lossy = m.damping_rate() > 0.0;
  if (have_lossy) lossy = scan_lossy(m, positive);

  CsvTable t;
  t.metadata = setup_metadata(setup);
  t.metadata.push_back("units: p in w_p/c, frequencies in w_p, kappa in w_p/c");
  t.columns = {"p", "re_omega_lossy", "im_omega_lossy", "kappa_lossy", "re_omega_lossless", "kappa_lossless"};
  std::size_t k = 0;
  for (double p : ps) {
    const PlasmonMode ll = dispersion_lossless(m, p);
    double re = kNaN, im = kNaN, ka = kNaN;
    if (p == 0.0 && have_lossy) {
      re = im = ka = 0.0;  // the branch starts at the origin
    } else if (have_lossy) {
      re = lossy[k].omega_bar.real() / wp;
      im = lossy[k].omega_bar.imag() / wp;
      ka = lossy[k].kappa_bar.real() / wp;
    }
    if (p > 0.0) ++k;
    t.rows.push_back({p / wp, re, im, ka, ll.omega_bar.real() / wp, ll.kappa_bar.real() / wp});
  }

  manifest.parameters["setup"] = setup.describe();
  manifest.parameters["p_range_wp"] = {args.pmin, args.pmax};
  manifest.parameters["points"] = args.points;
  if (!args.map_output.empty()) {
    const auto map = reflection_map(m, args.pmax * wp, args.map_p_points, -1.5 * wp, 0.0, args.map_omega_points);
    CsvTable mt;
    mt.metadata = {"|Im r_p| on a real (p, omega) grid; p in w_p/c, omega in w_p"};
    mt.columns = {"p", "omega", "abs_im_rp"};
    for (const auto& pt : map) mt.rows.push_back({pt.p / wp, pt.omega / wp, pt.abs_im_rp});
    std::ofstream out(args.map_output);
    if (!out) throw PreconditionError("cannot write " + args.map_output);
    mt.write(out);
    manifest.parameters["map_output"] = args.map_output;
  }
  return t;
}

CsvTable cmd_resonant(const ResonantArgs& args, RunManifest& manifest) {
  const Setup setup = resolve(args.setup, 10.0);
  if (!setup.surface.is_drude()) throw UnsupportedOperation("the resonant term needs a Drude material");
  AtomSurfaceConfig cfg;
  cfg.surface = setup.surface;
  cfg.z = setup.z;
  PotentialOptions popts = potential_options(args.common);
  const bool near = args.branch == "nearfield";
  if (args.branch == "lossless") popts.branch = ResonantBranch::Lossless;
  if (popts.branch == ResonantBranch::Lossy && !(cfg.surface.damping_rate() > 0.0)) {
    throw PreconditionError("the lossy branch needs gamma > 0; use --branch lossless");
  }
  const DynamicPotential pot(cfg, popts);
  const double us = std::abs(pot.u_static());

  std::vector<double> times;
  std::size_t omitted = 0;
  for (double t : args.grid.build()) {
    if (near || t > 2.0 * cfg.z) {
      times.push_back(t);
    } else {
      ++omitted;
    }
  }
  std::vector<double> values(times.size());
  parallel_for(times.size(), args.common.threads, [&](std::size_t i) {
    values[i] = (near ? delta_u_res_near_field(cfg, times[i]) : pot.delta_u_res(times[i])) / us;
  });

  const Envelope env = envelope_of(times, values);
  std::vector<double> lx, ly, lt, lp;
  for (std::size_t k = 0; k < env.t.size(); ++k) {
    lt.push_back(env.t[k]);
    lp.push_back(std::log(env.peak[k]));
    if (env.t[k] >= args.fit_tmin && env.t[k] <= args.fit_tmax) {
      lx.push_back(std::log(env.t[k]));
      ly.push_back(std::log(env.peak[k]));
    }
  }
  const double exponent = lx.size() >= 3 ? slope(lx, ly) : kNaN;
  const double rate = lt.size() >= 3 ? -slope(lt, lp) : kNaN;

  manifest.parameters["setup"] = setup.describe();
  manifest.parameters["branch"] = args.branch;
  manifest.parameters["fit_window"] = {args.fit_tmin, args.fit_tmax};
  manifest.tolerances = tolerance_summary(popts);
  manifest.results["u_stat"] = -us;
  manifest.results["envelope_exponent"] = std::isnan(exponent) ? nlohmann::json() : nlohmann::json(exponent);
  manifest.results["envelope_decay_rate"] = std::isnan(rate) ? nlohmann::json() : nlohmann::json(rate);
  manifest.results["omitted_rows"] = omitted;
  if (omitted > 0) manifest.results["note"] = "rows with ct <= 2z omitted";

  CsvTable t;
  t.metadata = setup_metadata(setup);
  t.metadata.push_back(fmt::format("branch: {}", args.branch));
  t.metadata.push_back("normalization: |U_stat|");
  if (omitted > 0) t.metadata.push_back(fmt::format("omitted {} rows with ct <= 2z", omitted));
  t.columns = {"t", "delta_u_res", "envelope", "envelope_exponent"};
  for (std::size_t i = 0; i < times.size(); ++i) {
    const bool inside = env.t.size() >= 2 && times[i] >= env.t.front() && times[i] <= env.t.back();
    t.rows.push_back({times[i], values[i], inside ? env(times[i]) : kNaN, exponent});
  }
  return t;
}

CsvTable cmd_partial(const PartialArgs& args, RunManifest& manifest) {
  const bool stark = args.ratio.has_value();
  const bool dipole = args.dipole_magnitude_sq.has_value() || args.dipole_overlap.has_value();
  if (stark == dipole) throw PreconditionError("give either --ratio or --dipole-magnitude/--dipole-overlap");
  const Setup setup = resolve(args.setup, 10.0);
  AtomSurfaceConfig cfg;
  cfg.surface = setup.surface;
  cfg.z = setup.z;
  SeriesOptions opts;
  opts.potential = potential_options(args.common);
  opts.threads = args.common.threads;
  const auto times = args.grid.build();

  PotentialSeries s;
  if (stark) {
    s = u_partial_stark(cfg, StarkShift{*args.ratio}, times, opts);
    manifest.parameters["quench"] = {{"kind", "stark"}, {"ratio", *args.ratio}};
  } else {
    const double mag = args.dipole_magnitude_sq.value_or(1.0);
    const double overlap = args.dipole_overlap.value_or(1.0);
    s = u_partial_dipole(cfg, DipoleChange{mag, overlap}, times, opts);
    manifest.parameters["quench"] = {{"kind", "dipole"}, {"magnitude_sq", mag}, {"overlap", overlap}};
  }
  if (args.common.normalization == "static") s = s.normalized();

  manifest.parameters["setup"] = setup.describe();
  manifest.tolerances = tolerance_summary(opts.potential);
  manifest.results["u_stat_new"] = s.u_stat;

  CsvTable t;
  t.metadata = setup_metadata(setup);
  t.metadata.push_back(stark ? fmt::format("scenario: partial dressing, Omega~/Omega = {}", *args.ratio)
                             : "scenario: partial dressing, dipole change");
  t.metadata.push_back(fmt::format("normalization: {}", args.common.normalization == "static"
                                                            ? "|U_stat| before the quench"
                                                            : "reduced"));
  t.columns = {"t", "u_stat", "u_dyn", "delta_u_res", "delta_u_partial", "total", "light_cone"};
  for (std::size_t i = 0; i < times.size(); ++i) {
    t.rows.push_back({times[i], s.u_stat, s.u_dyn[i], s.delta_u_res[i],
                      s.delta_u_partial ? (*s.delta_u_partial)[i] : kNaN, s.total[i],
                      s.light_cone_flag[i] ? 1.0 : 0.0});
  }
  return t;
}

CsvTable cmd_decay_time(const DecayArgs& args, RunManifest& manifest) {
  const Setup setup = resolve(args.setup, 1.0);
  if (!setup.surface.is_drude()) throw UnsupportedOperation("decay times need a Drude material");
  if (!(args.zmin > 0.0) || !(args.zmax >= args.zmin) || args.nz < 1) {
    throw PreconditionError("need 0 < zmin <= zmax and nz >= 1");
  }
  if (!(args.window >= 5.0)) throw PreconditionError("--window must be at least 5 estimated decay times");
  if (!(args.dt > 0.0)) throw PreconditionError("--dt must be positive");
  const double ws = setup.surface.surface_plasmon_frequency();
  DecayTimeOptions opts;
  opts.tau = args.tau;
  opts.potential = potential_options(args.common);
  opts.threads = args.common.threads;

  CsvTable t;
  t.metadata = setup_metadata(setup);
  t.metadata.push_back("t_decay measured from the switch-on t = 0; ok = 0 marks a failed envelope fit");
  t.columns = {"z", "t_decay_numeric", "t_decay_estimate", "ok"};
  double num = 0.0, den = 0.0;
  int failures = 0;
  for (int i = 0; i < args.nz; ++i) {
    const double z = args.nz == 1 ? args.zmin : args.zmin * std::pow(args.zmax / args.zmin, double(i) / (args.nz - 1));
    AtomSurfaceConfig cfg;
    cfg.surface = setup.surface;
    cfg.z = z;
    const double est = decay_time_estimate(cfg.surface, z, args.tau);
    std::vector<double> times;
    const double span = args.window * est;
    const auto n = static_cast<std::size_t>(std::ceil(span / args.dt));
    for (std::size_t k = 0; k <= n; ++k) times.push_back(span * static_cast<double>(k) / static_cast<double>(n));
    try {
      const DecayTimeResult r = decay_time(cfg, times, opts);
      const double s = std::numbers::pi * std::sqrt(z / ws);
      num += r.t_decay_numeric * s;
      den += s * s;
      t.rows.push_back({z, r.t_decay_numeric, r.t_decay_estimate, 1.0});
    } catch (const FitError&) {
      ++failures;
      t.rows.push_back({z, kNaN, est, 0.0});
    }
  }
  manifest.parameters["setup"] = setup.describe();
  manifest.parameters["z_range"] = {args.zmin, args.zmax};
  manifest.parameters["nz"] = args.nz;
  manifest.parameters["tau"] = args.tau;
  manifest.parameters["window_estimates"] = args.window;
  manifest.parameters["dt"] = args.dt;
  manifest.tolerances = tolerance_summary(opts.potential);
  manifest.results["fitted_tau"] = den > 0.0 ? nlohmann::json(num / den) : nlohmann::json();
  manifest.results["failed_fits"] = failures;
  return t;
}

}  // namespace dyncp::cli
