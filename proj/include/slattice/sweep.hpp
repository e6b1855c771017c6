#ifndef SLATTICE_SWEEP_HPP
#define SLATTICE_SWEEP_HPP

#include <cmath>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "slattice/config.hpp"
#include "slattice/dynamics.hpp"
#include "slattice/io.hpp"
#include "slattice/lattice.hpp"
#include "slattice/parallel.hpp"
#include "slattice/topology.hpp"

namespace slattice {

enum class Observable { chern_fhs, chern_analytic_sign, min_gap, eta };

inline std::string to_string(Observable o) {
  switch (o) {
    case Observable::chern_fhs: return "chern_fhs";
    case Observable::chern_analytic_sign: return "chern_analytic_sign";
    case Observable::min_gap: return "min_gap";
    case Observable::eta: return "eta";
  }
  return "?";
}

inline Observable observable_from_string(const std::string& s) {
  for (Observable o : {Observable::chern_fhs, Observable::chern_analytic_sign, Observable::min_gap, Observable::eta})
    if (to_string(o) == s) return o;
  throw ParameterError("unknown observable '" + s + "'");
}

/// Parses a comma-separated observable list such as "chern_fhs,min_gap".
inline std::set<Observable> parse_observables(const std::string& list) {
  std::set<Observable> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ','))
    if (!item.empty()) out.insert(observable_from_string(item));
  if (out.empty()) throw ParameterError("observable list is empty");
  return out;
}

/// Per-cell evaluation settings. FHS is the expensive observable, so it is
/// evaluated on every `fhs_stride`-th row and column only (cells off that
/// sub-grid report null).
struct SweepOptions {
  std::set<Observable> observables{Observable::chern_fhs, Observable::chern_analytic_sign, Observable::min_gap,
                                   Observable::eta};
  int fhs_grid = 60;
  int fhs_stride = 2;
  int gap_grid = 48;
  double eta_delta_p = 0.0;
  double eta_velocity = 0.0;
  // Cells whose band gap is below this fraction of Ω are flagged unreliable.
  double reliable_gap_fraction = 1e-3;
  int jobs = 1;
  std::string timestamp;  // empty: current UTC time

  bool wants(Observable o) const { return observables.count(o) != 0; }
};

struct PhaseCell {
  std::optional<int> chern_fhs;
  int chern_analytic_sign = 0;
  std::optional<double> min_gap;
  std::optional<double> eta;
  bool reliable = false;
  std::string note;

  bool operator==(const PhaseCell&) const = default;
};

struct Axis {
  std::string name;
  std::vector<double> values;
};

struct PhaseDiagramGrid {
  Axis axis1;
  Axis axis2;
  std::vector<std::vector<PhaseCell>> cells;  // cells[i][j] ↔ (axis1[i], axis2[j])
  json meta;

  const PhaseCell& at(std::size_t i, std::size_t j) const { return cells.at(i).at(j); }
};

/// Evaluates the requested observables for one fully specified config.
/// Failures are caught and recorded in the cell.
inline PhaseCell evaluate_cell(const LatticeConfig& cfg, const SweepOptions& opt, bool with_fhs) {
  PhaseCell cell;
  std::vector<std::string> notes;
  bool ok = true;
  auto guard = [&](const char* what, auto&& fn) {
    try {
      fn();
    } catch (const std::exception& e) {
      ok = false;
      notes.push_back(std::string(what) + ": " + e.what());
    }
  };
  std::optional<FloquetModel> model;
  guard("config", [&] { model.emplace(cfg); });
  if (!model) {
    cell.note = notes.front();
    return cell;
  }
  if (opt.wants(Observable::chern_analytic_sign))
    guard("chern_analytic_sign", [&] { cell.chern_analytic_sign = chern_bessel(model->config().phi, cfg.f); });
  if (opt.wants(Observable::min_gap))
    guard("min_gap", [&] {
      const double g = min_bandgap(*model, opt.gap_grid).gap;
      cell.min_gap = g;
      if (g < opt.reliable_gap_fraction * cfg.omega) {
        ok = false;
        notes.push_back("gap below tolerance");
      }
    });
  if (with_fhs && opt.wants(Observable::chern_fhs))
    guard("chern_fhs", [&] {
      const auto c = chern_fhs(*model, opt.fhs_grid);
      cell.chern_fhs = c.value;
      if (!c.reliable) {
        ok = false;
        notes.push_back("chern_fhs: " + (c.note.empty() ? std::string("unreliable") : c.note));
      }
    });
  if (opt.wants(Observable::eta))
    guard("eta", [&] {
      const auto r = SteadyStateSolver(cfg, opt.eta_velocity).solve(opt.eta_delta_p);
      cell.eta = r.eta;
      if (!r.eta) {
        ok = false;
        notes.push_back("eta: undefined");
      }
    });
  cell.reliable = ok;
  for (std::size_t i = 0; i < notes.size(); ++i) cell.note += (i ? "; " : "") + notes[i];
  return cell;
}

namespace detail {

inline json sweep_meta(const std::string& kind, const LatticeConfig& base, const SweepOptions& opt) {
  json m;
  m["kind"] = kind;
  m["config"] = config_to_json(base);
  json obs = json::array();
  for (Observable o : opt.observables) obs.push_back(to_string(o));
  m["observables"] = obs;
  m["fhs_grid"] = opt.fhs_grid;
  m["fhs_stride"] = opt.fhs_stride;
  m["gap_grid"] = opt.gap_grid;
  m["eta_delta_p_mhz"] = opt.eta_delta_p;
  m["eta_velocity"] = opt.eta_velocity;
  m["reliable_gap_fraction"] = opt.reliable_gap_fraction;
  m["version"] = kVersion;
  m["timestamp"] = opt.timestamp.empty() ? utc_timestamp() : opt.timestamp;
  return m;
}

inline void check_options(const SweepOptions& opt) {
  if (opt.fhs_grid < 12) throw ParameterError("fhs_grid must be >= 12");
  if (opt.fhs_stride < 1) throw ParameterError("fhs_stride must be >= 1");
  if (opt.gap_grid < 24) throw ParameterError("gap_grid must be >= 24");
  if (opt.observables.empty()) throw ParameterError("no observables requested");
}

inline bool on_fhs_subgrid(std::size_t i, std::size_t j, int stride) {
  return i % static_cast<std::size_t>(stride) == 0 && j % static_cast<std::size_t>(stride) == 0;
}

inline PhaseDiagramGrid run_grid(Axis a1, Axis a2, const SweepOptions& opt, json meta,
                                 const std::function<LatticeConfig(std::size_t, std::size_t)>& cfg_at) {
  PhaseDiagramGrid out{std::move(a1), std::move(a2), {}, std::move(meta)};
  const std::size_t n1 = out.axis1.values.size(), n2 = out.axis2.values.size();
  out.cells.assign(n1, std::vector<PhaseCell>(n2));
  parallel_for(n1 * n2, opt.jobs, [&](std::size_t k) {
    const std::size_t i = k / n2, j = k % n2;
    out.cells[i][j] = evaluate_cell(cfg_at(i, j), opt, on_fhs_subgrid(i, j, opt.fhs_stride));
  });
  return out;
}

}  // namespace detail

/// Uniform phase grid value i of n: 2πi/n.
inline double phase_grid_value(std::size_t i, std::size_t n) { return kTwoPi * static_cast<double>(i) / static_cast<double>(n); }

/// (φ₂, φ₃) phase diagram on the uniform grid [0, 2π)², with φ₁ taken from cfg.
inline PhaseDiagramGrid sweep_phase(const LatticeConfig& cfg, int grid_n, const SweepOptions& opt = {}) {
  if (grid_n < 4) throw ParameterError("grid_n must be >= 4");
  detail::check_options(opt);
  cfg.validate();
  Axis a1{"phi2_rad", {}}, a2{"phi3_rad", {}};
  for (int i = 0; i < grid_n; ++i) a1.values.push_back(phase_grid_value(i, grid_n));
  a2.values = a1.values;
  json meta = detail::sweep_meta("sweep_phase", cfg, opt);
  meta["grid_n"] = grid_n;
  const auto values = a1.values;
  return detail::run_grid(std::move(a1), std::move(a2), opt, std::move(meta), [&](std::size_t i, std::size_t j) {
    LatticeConfig c = cfg;
    c.phi[1] = values[i];
    c.phi[2] = values[j];
    return c;
  });
}

/// (Ω, f) phase diagram at fixed phases.
inline PhaseDiagramGrid sweep_modulation(const LatticeConfig& cfg, const std::vector<double>& omega_values,
                                         const std::vector<double>& f_values, const SweepOptions& opt = {}) {
  detail::check_options(opt);
  if (omega_values.empty() || f_values.empty()) throw ParameterError("sweep axes must be non-empty");
  for (double w : omega_values)
    if (!std::isfinite(w) || w <= 0.0) throw ParameterError("omega values must be finite and > 0");
  for (double f : f_values)
    if (!std::isfinite(f) || f < 0.0) throw ParameterError("f values must be finite and >= 0");
  Axis a1{"omega_mhz", omega_values}, a2{"f", f_values};
  json meta = detail::sweep_meta("sweep_modulation", cfg, opt);
  return detail::run_grid(std::move(a1), std::move(a2), opt, std::move(meta), [&](std::size_t i, std::size_t j) {
    LatticeConfig c = cfg;
    c.omega = omega_values[i];
    c.f = f_values[j];
    return c;
  });
}

/// Reconstructs the config of cell (i, j) from a grid's meta block and
/// evaluates it again with the stored options.
inline PhaseCell rerun_cell(const PhaseDiagramGrid& g, std::size_t i, std::size_t j) {
  const json& m = g.meta;
  LatticeConfig c = config_from_json(m.at("config"));
  const std::string kind = m.at("kind").get<std::string>();
  if (kind == "sweep_phase") {
    c.phi[1] = g.axis1.values.at(i);
    c.phi[2] = g.axis2.values.at(j);
  } else if (kind == "sweep_modulation") {
    c.omega = g.axis1.values.at(i);
    c.f = g.axis2.values.at(j);
  } else {
    throw ConfigurationError("unknown sweep kind '" + kind + "'");
  }
  SweepOptions opt;
  opt.observables.clear();
  for (const auto& o : m.at("observables")) opt.observables.insert(observable_from_string(o.get<std::string>()));
  opt.fhs_grid = m.at("fhs_grid").get<int>();
  opt.fhs_stride = m.at("fhs_stride").get<int>();
  opt.gap_grid = m.at("gap_grid").get<int>();
  opt.eta_delta_p = m.at("eta_delta_p_mhz").get<double>();
  opt.eta_velocity = m.at("eta_velocity").get<double>();
  opt.reliable_gap_fraction = m.at("reliable_gap_fraction").get<double>();
  return evaluate_cell(c, opt, detail::on_fhs_subgrid(i, j, opt.fhs_stride));
}

// --- serialization -------------------------------------------------------

inline json to_json(const PhaseCell& c) {
  json j;
  j["chern_fhs"] = c.chern_fhs ? json(*c.chern_fhs) : json(nullptr);
  j["chern_analytic_sign"] = c.chern_analytic_sign;
  j["min_gap"] = c.min_gap ? json(*c.min_gap) : json(nullptr);
  j["eta"] = c.eta ? json(*c.eta) : json(nullptr);
  j["reliable"] = c.reliable;
  j["note"] = c.note;
  return j;
}

inline PhaseCell cell_from_json(const json& j) {
  PhaseCell c;
  if (!j.at("chern_fhs").is_null()) c.chern_fhs = j.at("chern_fhs").get<int>();
  c.chern_analytic_sign = j.at("chern_analytic_sign").get<int>();
  if (!j.at("min_gap").is_null()) c.min_gap = j.at("min_gap").get<double>();
  if (!j.at("eta").is_null()) c.eta = j.at("eta").get<double>();
  c.reliable = j.at("reliable").get<bool>();
  if (j.contains("note")) c.note = j.at("note").get<std::string>();
  return c;
}

inline json to_json(const PhaseDiagramGrid& g) {
  json j;
  j["axis1"] = {{"name", g.axis1.name}, {"values", g.axis1.values}};
  j["axis2"] = {{"name", g.axis2.name}, {"values", g.axis2.values}};
  json rows = json::array();
  for (const auto& row : g.cells) {
    json r = json::array();
    for (const auto& c : row) r.push_back(to_json(c));
    rows.push_back(std::move(r));
  }
  j["cells"] = std::move(rows);
  j["meta"] = g.meta;
  return j;
}

inline PhaseDiagramGrid grid_from_json(const json& j) {
  PhaseDiagramGrid g;
  g.axis1 = {j.at("axis1").at("name").get<std::string>(), j.at("axis1").at("values").get<std::vector<double>>()};
  g.axis2 = {j.at("axis2").at("name").get<std::string>(), j.at("axis2").at("values").get<std::vector<double>>()};
  for (const auto& row : j.at("cells")) {
    std::vector<PhaseCell> r;
    for (const auto& c : row) r.push_back(cell_from_json(c));
    g.cells.push_back(std::move(r));
  }
  g.meta = j.at("meta");
  return g;
}

inline constexpr const char* kPhaseCsvHeader = "axis1_value,axis2_value,chern_fhs,chern_analytic_sign,min_gap_mhz,eta,reliable";

/// One row per cell in row-major order; empty fields mark values not computed.
inline std::string to_csv(const PhaseDiagramGrid& g) {
  std::ostringstream os;
  os << kPhaseCsvHeader << '\n';
  for (std::size_t i = 0; i < g.cells.size(); ++i)
    for (std::size_t j = 0; j < g.cells[i].size(); ++j) {
      const auto& c = g.cells[i][j];
      os << csv_number(g.axis1.values[i]) << ',' << csv_number(g.axis2.values[j]) << ','
         << (c.chern_fhs ? std::to_string(*c.chern_fhs) : "") << ',' << c.chern_analytic_sign << ','
         << (c.min_gap ? csv_number(*c.min_gap) : "") << ',' << (c.eta ? csv_number(*c.eta) : "") << ','
         << (c.reliable ? "true" : "false") << '\n';
    }
  return os.str();
}

// --- absorption map --------------------------------------------------------

/// Absorption as a function of modulation depth (rows) and probe detuning
/// (columns). Entries that failed are null, with the reason in `notes`.
struct SpectrumMap {
  Axis axis1;  // f
  Axis axis2;  // delta_p_mhz
  std::vector<std::vector<std::optional<double>>> absorption;
  std::vector<std::string> notes;
  json meta;
};

inline SpectrumMap spectrum_vs_f(const LatticeConfig& cfg, const std::vector<double>& f_values,
                                 const std::vector<double>& delta_grid, double velocity = 0.0, int jobs = 1,
                                 const std::string& timestamp = "") {
  if (f_values.empty() || delta_grid.empty()) throw ParameterError("spectrum axes must be non-empty");
  for (double f : f_values)
    if (!std::isfinite(f) || f < 0.0) throw ParameterError("f values must be finite and >= 0");
  for (double d : delta_grid)
    if (!std::isfinite(d)) throw ParameterError("detunings must be finite");
  SpectrumMap out;
  out.axis1 = {"f", f_values};
  out.axis2 = {"delta_p_mhz", delta_grid};
  out.absorption.assign(f_values.size(), std::vector<std::optional<double>>(delta_grid.size()));
  std::vector<std::string> row_notes(f_values.size());
  const std::size_t nd = delta_grid.size();
  // One solver per row; rows are split into cells so a single failure stays local.
  std::vector<std::optional<SteadyStateSolver>> solvers(f_values.size());
  parallel_for(f_values.size(), jobs, [&](std::size_t i) {
    LatticeConfig c = cfg;
    c.f = f_values[i];
    try {
      solvers[i].emplace(c, velocity);
    } catch (const std::exception& e) {
      row_notes[i] = "f=" + csv_number(f_values[i]) + ": " + e.what();
    }
  });
  std::vector<std::string> cell_notes(f_values.size() * nd);
  parallel_for(f_values.size() * nd, jobs, [&](std::size_t k) {
    const std::size_t i = k / nd, j = k % nd;
    if (!solvers[i]) return;
    try {
      const double a = solvers[i]->solve(delta_grid[j]).absorption;
      if (a < -1e-9) throw NumericalError("negative absorption " + std::to_string(a));
      out.absorption[i][j] = std::max(a, 0.0);
    } catch (const std::exception& e) {
      cell_notes[k] = "f=" + csv_number(f_values[i]) + ", delta_p=" + csv_number(delta_grid[j]) + ": " + e.what();
    }
  });
  for (const auto& n : row_notes)
    if (!n.empty()) out.notes.push_back(n);
  for (const auto& n : cell_notes)
    if (!n.empty()) out.notes.push_back(n);
  out.meta["kind"] = "spectrum_vs_f";
  out.meta["config"] = config_to_json(cfg);
  out.meta["velocity"] = velocity;
  out.meta["version"] = kVersion;
  out.meta["timestamp"] = timestamp.empty() ? utc_timestamp() : timestamp;
  return out;
}

inline json to_json(const SpectrumMap& s) {
  json j;
  j["axis1"] = {{"name", s.axis1.name}, {"values", s.axis1.values}};
  j["axis2"] = {{"name", s.axis2.name}, {"values", s.axis2.values}};
  json rows = json::array();
  for (const auto& row : s.absorption) {
    json r = json::array();
    for (const auto& v : row) r.push_back(v ? json(*v) : json(nullptr));
    rows.push_back(std::move(r));
  }
  j["absorption"] = std::move(rows);
  j["notes"] = s.notes;
  j["meta"] = s.meta;
  return j;
}

/// Evenly spaced values lo, ..., hi (steps points, steps ≥ 1).
inline std::vector<double> linspace(double lo, double hi, int steps) {
  if (steps < 1) throw ParameterError("steps must be >= 1");
  if (!std::isfinite(lo) || !std::isfinite(hi)) throw ParameterError("range must be finite");
  std::vector<double> v(steps);
  for (int i = 0; i < steps; ++i) v[i] = steps == 1 ? lo : lo + (hi - lo) * i / (steps - 1);
  return v;
}

}  // namespace slattice

#endif
