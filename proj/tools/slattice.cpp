// Command-line front end: one subcommand per capability, a JSON config file
// plus flag overrides in, JSON/CSV out.
//
// Exit codes: 0 success, 2 configuration or usage error, 3 numerical failure.

#include <cmath>
#include <cstdio>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "slattice/slattice.hpp"

namespace {

using namespace slattice;

constexpr int kExitOk = 0;
constexpr int kExitConfig = 2;
constexpr int kExitNumerical = 3;

/// Options shared by every subcommand.
struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  std::vector<double> phi;
  bool degrees = false;
  int jobs = default_jobs();

  void attach(CLI::App* app) {
    app->add_option("--config,-c", config_path, "JSON config file");
    app->add_option("--set", sets, "Override a config key, e.g. --set f=2.6 (value is JSON)")->take_all();
    app->add_option("--phi", phi, "Override the three phases")->expected(3);
    app->add_flag("--degrees", degrees, "Interpret --phi in degrees");
    app->add_option("--jobs,-j", jobs, "Worker threads")->check(CLI::PositiveNumber);
  }

  /// Config file, then --set overrides, then --phi. omega_mhz and f must end
  /// up defined by one of them.
  LatticeConfig resolve() const {
    LatticeConfig cfg;
    bool have_omega = false, have_f = false;
    if (!config_path.empty()) {
      const std::string text = read_text_file(config_path);
      const json doc = parse_json_text(text);
      apply_config_json(cfg, doc, text);
      have_omega = doc.contains("omega_mhz");
      have_f = doc.contains("f");
    }
    for (const auto& s : sets) {
      const auto eq = s.find('=');
      if (eq == std::string::npos || eq == 0) throw ConfigParseError("", 0, "--set expects key=value, got '" + s + "'");
      const std::string key = s.substr(0, eq), raw = s.substr(eq + 1);
      json value;
      try {
        value = json::parse(raw);
      } catch (const json::parse_error&) {
        value = raw;  // bare strings such as n_max=auto
      }
      const json doc{{key, value}};
      apply_config_json(cfg, doc, doc.dump());
      have_omega |= key == "omega_mhz";
      have_f |= key == "f";
    }
    if (!phi.empty()) {
      for (int j = 0; j < 3; ++j) cfg.phi[j] = degrees ? phi[j] * kPi / 180.0 : phi[j];
      for (double p : cfg.phi)
        if (!std::isfinite(p)) throw ConfigParseError("phi", 0, "must be finite");
    }
    if (!have_omega) throw ConfigParseError("omega_mhz", 0, "required key missing (config file or --set)");
    if (!have_f) throw ConfigParseError("f", 0, "required key missing (config file or --set)");
    cfg.validate();
    return cfg;
  }
};

std::string signed_int(int v) { return v > 0 ? "+" + std::to_string(v) : std::to_string(v); }

std::string fixed6(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", x);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

std::vector<double> parse_list(const std::string& list) {
  std::vector<double> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(item, &used);
    } catch (...) {
      used = 0;
    }
    if (used == 0 || used != item.size()) throw ParameterError("bad number '" + item + "' in list");
    out.push_back(v);
  }
  if (out.empty()) throw ParameterError("empty list");
  return out;
}

void write_json(const std::string& path, const json& doc) { write_text(path, doc.dump(2) + "\n"); }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Floquet honeycomb momentum-space lattice: bands, topology and superradiance"};
  app.set_version_flag("--version", std::string(kVersion));
  app.require_subcommand(1);

  // bands
  Common bands_c;
  std::string bands_path = "K,G,M,Kp", bands_out = "-";
  int bands_points = 100;
  auto* bands = app.add_subcommand("bands", "Band energies and <sigma_z> along a path through the zone");
  bands_c.attach(bands);
  bands->add_option("--path", bands_path, "Comma-separated nodes from K, Kp, G, M")->capture_default_str();
  bands->add_option("--points", bands_points, "Samples per segment")->check(CLI::PositiveNumber)->capture_default_str();
  bands->add_option("--out,-o", bands_out, "Output CSV ('-' for stdout)")->capture_default_str();

  // dirac
  Common dirac_c;
  std::string dirac_out = "-";
  int dirac_grid = 96;
  auto* dirac = app.add_subcommand("dirac", "Locate Dirac points with chirality and local gap");
  dirac_c.attach(dirac);
  dirac->add_option("--grid", dirac_grid, "Seed grid per reciprocal direction")->capture_default_str();
  dirac->add_option("--out,-o", dirac_out, "Output JSON ('-' for stdout)")->capture_default_str();

  // chern
  Common chern_c;
  std::string chern_method = "fhs";
  int chern_grid = 60;
  auto* chern = app.add_subcommand("chern", "Chern number of the lower effective band");
  chern_c.attach(chern);
  chern->add_option("--method", chern_method, "fhs | dp | small-f | bessel")
      ->check(CLI::IsMember({"fhs", "dp", "small-f", "bessel"}))
      ->capture_default_str();
  chern->add_option("--grid", chern_grid, "Grid for fhs (plaquettes) or dp (seeds)")->capture_default_str();

  // eta
  Common eta_c;
  double eta_dp = 0.0, eta_v = 0.0;
  auto* eta = app.add_subcommand("eta", "Superradiance contrast of the driven lattice");
  eta_c.attach(eta);
  eta->add_option("--delta-p", eta_dp, "Probe detuning (MHz)")->required();
  eta->add_option("--velocity", eta_v, "Atomic velocity (MHz per unit wavevector)")->capture_default_str();

  // spectrum
  Common spec_c;
  double spec_min = -80.0, spec_max = 80.0, spec_v = 0.0;
  int spec_steps = 161;
  std::string spec_out = "-";
  auto* spectrum = app.add_subcommand("spectrum", "Probe absorption versus detuning");
  spec_c.attach(spectrum);
  spectrum->add_option("--delta-min", spec_min)->capture_default_str();
  spectrum->add_option("--delta-max", spec_max)->capture_default_str();
  spectrum->add_option("--steps", spec_steps)->check(CLI::PositiveNumber)->capture_default_str();
  spectrum->add_option("--velocity", spec_v)->capture_default_str();
  spectrum->add_option("--out,-o", spec_out, "Output CSV ('-' for stdout)")->capture_default_str();

  // shared sweep settings
  struct SweepFlags {
    std::string observables = "chern_fhs,chern_analytic_sign,min_gap,eta";
    int fhs_grid = 60, fhs_stride = 2, gap_grid = 48;
    std::string out = "-", csv;
    void attach(CLI::App* a) {
      a->add_option("--observables", observables, "Comma-separated subset of chern_fhs, chern_analytic_sign, min_gap, eta")
          ->capture_default_str();
      a->add_option("--fhs-grid", fhs_grid)->capture_default_str();
      a->add_option("--fhs-stride", fhs_stride, "Evaluate chern_fhs on every n-th row/column")->capture_default_str();
      a->add_option("--gap-grid", gap_grid)->capture_default_str();
      a->add_option("--out,-o", out, "Output JSON ('-' for stdout)")->capture_default_str();
      a->add_option("--csv", csv, "Also write the per-cell CSV");
    }
    SweepOptions options(int jobs) const {
      SweepOptions o;
      o.observables = parse_observables(observables);
      o.fhs_grid = fhs_grid;
      o.fhs_stride = fhs_stride;
      o.gap_grid = gap_grid;
      o.jobs = jobs;
      return o;
    }
  };

  Common sp_c;
  SweepFlags sp_f;
  int sp_grid = 24;
  auto* sweep_phase_cmd = app.add_subcommand("sweep-phase", "Phase diagram over (phi2, phi3)");
  sp_c.attach(sweep_phase_cmd);
  sp_f.attach(sweep_phase_cmd);
  sweep_phase_cmd->add_option("--grid", sp_grid, "Grid points per phase axis")->capture_default_str();

  Common sm_c;
  SweepFlags sm_f;
  std::string sm_omega;
  double sm_fmin = 0.0, sm_fmax = 7.0;
  int sm_fsteps = 71;
  auto* sweep_mod_cmd = app.add_subcommand("sweep-mod", "Phase diagram over (Omega, f)");
  sm_c.attach(sweep_mod_cmd);
  sm_f.attach(sweep_mod_cmd);
  sweep_mod_cmd->add_option("--omega", sm_omega, "Comma-separated coupling strengths (MHz)")->required();
  sweep_mod_cmd->add_option("--f-min", sm_fmin)->capture_default_str();
  sweep_mod_cmd->add_option("--f-max", sm_fmax)->capture_default_str();
  sweep_mod_cmd->add_option("--f-steps", sm_fsteps)->capture_default_str();

  Common sf_c;
  double sf_fmin = 0.0, sf_fmax = 7.0, sf_dmin = -80.0, sf_dmax = 80.0, sf_v = 0.0;
  int sf_fsteps = 71, sf_dsteps = 161;
  std::string sf_out = "-";
  auto* svf = app.add_subcommand("spectrum-vs-f", "Absorption map over modulation depth and detuning");
  sf_c.attach(svf);
  svf->add_option("--f-min", sf_fmin)->capture_default_str();
  svf->add_option("--f-max", sf_fmax)->capture_default_str();
  svf->add_option("--f-steps", sf_fsteps)->capture_default_str();
  svf->add_option("--delta-min", sf_dmin)->capture_default_str();
  svf->add_option("--delta-max", sf_dmax)->capture_default_str();
  svf->add_option("--delta-steps", sf_dsteps)->capture_default_str();
  svf->add_option("--velocity", sf_v)->capture_default_str();
  svf->add_option("--out,-o", sf_out, "Output JSON ('-' for stdout)")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);
    std::cerr << "error: " << e.what() << "\n\n" << app.help();
    return kExitConfig;
  }

  try {
    if (bands->parsed()) {
      const LatticeConfig cfg = bands_c.resolve();
      const BrillouinZone bz(cfg.geometry);
      std::vector<BlochPoint> nodes;
      std::stringstream ss(bands_path);
      std::string label;
      while (std::getline(ss, label, ',')) nodes.push_back(bz.named(label));
      write_text(bands_out, bands_csv(band_polarization(cfg, linear_path(nodes, bands_points))));
    } else if (dirac->parsed()) {
      const LatticeConfig cfg = dirac_c.resolve();
      DiracOptions opt;
      opt.grid = dirac_grid;
      const FloquetModel model(cfg);
      write_json(dirac_out, to_json(find_dirac_points(model, opt), model.zone(), run_meta("dirac", cfg)));
    } else if (chern->parsed()) {
      const LatticeConfig cfg = chern_c.resolve();
      if (chern_method == "small-f" || chern_method == "bessel") {
        const int c = chern_method == "small-f" ? chern_small_f(cfg.phi) : chern_bessel(cfg.phi, cfg.f);
        std::cout << signed_int(c) << (c == 0 ? " unreliable" : "") << "\n";
      } else {
        ChernResult r;
        if (chern_method == "fhs") {
          r = chern_fhs(cfg, chern_grid);
        } else {
          DiracOptions opt;
          opt.grid = chern_grid;
          r = chern_dp_counting(cfg, opt);
        }
        std::cout << signed_int(r.value) << (r.reliable ? " reliable" : " unreliable") << "\n";
        if (!r.note.empty()) std::cerr << "note: " << r.note << "\n";
      }
    } else if (eta->parsed()) {
      const LatticeConfig cfg = eta_c.resolve();
      std::cout << fixed6(superradiance_contrast(cfg, eta_dp, eta_v)) << "\n";
    } else if (spectrum->parsed()) {
      const LatticeConfig cfg = spec_c.resolve();
      const auto grid = linspace(spec_min, spec_max, spec_steps);
      write_text(spec_out, spectrum_csv(grid, absorption_spectrum(cfg, grid, spec_v, spec_c.jobs)));
    } else if (sweep_phase_cmd->parsed()) {
      const LatticeConfig cfg = sp_c.resolve();
      const auto g = sweep_phase(cfg, sp_grid, sp_f.options(sp_c.jobs));
      write_json(sp_f.out, to_json(g));
      if (!sp_f.csv.empty()) write_text(sp_f.csv, to_csv(g));
    } else if (sweep_mod_cmd->parsed()) {
      const LatticeConfig cfg = sm_c.resolve();
      const auto g = sweep_modulation(cfg, parse_list(sm_omega), linspace(sm_fmin, sm_fmax, sm_fsteps),
                                      sm_f.options(sm_c.jobs));
      write_json(sm_f.out, to_json(g));
      if (!sm_f.csv.empty()) write_text(sm_f.csv, to_csv(g));
    } else if (svf->parsed()) {
      const LatticeConfig cfg = sf_c.resolve();
      const auto m = spectrum_vs_f(cfg, linspace(sf_fmin, sf_fmax, sf_fsteps), linspace(sf_dmin, sf_dmax, sf_dsteps),
                                   sf_v, sf_c.jobs);
      write_json(sf_out, to_json(m));
      for (const auto& n : m.notes) std::cerr << "warning: " << n << "\n";
    }
  } catch (const ConfigurationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ParameterError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const TruncationError& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const std::exception& e) {
    std::cerr << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  }
  return kExitOk;
}
