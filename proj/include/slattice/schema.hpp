#ifndef SLATTICE_SCHEMA_HPP
#define SLATTICE_SCHEMA_HPP

// Structural validators for every result file the tool writes. Each returns
// a list of problems (empty = valid). Extra keys count as problems, so a file
// produced by anything else is rejected.

#include <cmath>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "slattice/io.hpp"
#include "slattice/output.hpp"
#include "slattice/sweep.hpp"

namespace slattice::schema {

using Problems = std::vector<std::string>;

namespace detail {

inline void exact_keys(const json& j, const std::set<std::string>& keys, const std::string& where, Problems& out) {
  if (!j.is_object()) {
    out.push_back(where + ": expected object");
    return;
  }
  for (const auto& k : keys)
    if (!j.contains(k)) out.push_back(where + ": missing key '" + k + "'");
  for (const auto& [k, _] : j.items())
    if (!keys.count(k)) out.push_back(where + ": unexpected key '" + k + "'");
}

inline bool is_xy(const json& j) { return j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number(); }

inline bool number_or_null(const json& j) { return j.is_null() || j.is_number(); }

inline void check_axis(const json& j, const std::string& where, Problems& out) {
  exact_keys(j, {"name", "values"}, where, out);
  if (!j.is_object()) return;
  if (j.contains("name") && !j["name"].is_string()) out.push_back(where + ".name: expected string");
  if (j.contains("values")) {
    if (!j["values"].is_array() || j["values"].empty()) {
      out.push_back(where + ".values: expected non-empty array");
    } else {
      for (const auto& v : j["values"])
        if (!v.is_number()) {
          out.push_back(where + ".values: non-numeric entry");
          break;
        }
    }
  }
}

inline void check_meta(const json& j, const std::set<std::string>& extra, Problems& out) {
  std::set<std::string> keys{"kind", "config", "version", "timestamp"};
  keys.insert(extra.begin(), extra.end());
  exact_keys(j, keys, "meta", out);
  if (!j.is_object()) return;
  if (j.contains("config")) {
    try {
      config_from_json(j["config"]);
    } catch (const std::exception& e) {
      out.push_back(std::string("meta.config: ") + e.what());
    }
  }
  if (j.contains("version") && !j["version"].is_string()) out.push_back("meta.version: expected string");
  if (j.contains("timestamp") && !j["timestamp"].is_string()) out.push_back("meta.timestamp: expected string");
}

inline std::size_t axis_len(const json& doc, const char* name) {
  if (!doc.contains(name) || !doc[name].is_object() || !doc[name].contains("values") || !doc[name]["values"].is_array())
    return 0;
  return doc[name]["values"].size();
}

inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  std::stringstream ss(line);
  while (std::getline(ss, cur, ',')) out.push_back(cur);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

inline bool parses_number(const std::string& s) {
  if (s.empty()) return false;
  if (s == "nan") return true;
  try {
    std::size_t used = 0;
    std::stod(s, &used);
    return used == s.size();
  } catch (...) {
    return false;
  }
}

inline Problems check_csv(const std::string& text, const std::string& header,
                          const std::function<void(const std::vector<std::string>&, std::size_t, Problems&)>& row) {
  Problems out;
  std::stringstream ss(text);
  std::string line;
  if (!std::getline(ss, line) || line != header) {
    out.push_back("header: expected '" + header + "'");
    return out;
  }
  const std::size_t ncol = split(header).size();
  std::size_t n = 0;
  while (std::getline(ss, line)) {
    ++n;
    const auto f = split(line);
    if (f.size() != ncol) {
      out.push_back("row " + std::to_string(n) + ": expected " + std::to_string(ncol) + " fields");
      continue;
    }
    row(f, n, out);
  }
  if (n == 0) out.push_back("no data rows");
  return out;
}

}  // namespace detail

/// sweep-phase / sweep-mod output.
inline Problems check_phase_grid(const json& doc) {
  Problems out;
  detail::exact_keys(doc, {"axis1", "axis2", "cells", "meta"}, "document", out);
  if (!doc.is_object()) return out;
  if (doc.contains("axis1")) detail::check_axis(doc["axis1"], "axis1", out);
  if (doc.contains("axis2")) detail::check_axis(doc["axis2"], "axis2", out);
  if (doc.contains("meta")) {
    std::set<std::string> extra = {"observables",   "fhs_grid",     "fhs_stride",           "gap_grid",
                                      "eta_delta_p_mhz", "eta_velocity", "reliable_gap_fraction"};
    const bool phase = doc["meta"].is_object() && doc["meta"].value("kind", std::string()) == "sweep_phase";
    if (phase) extra.insert("grid_n");
    detail::check_meta(doc["meta"], extra, out);
    if (doc["meta"].is_object() && doc["meta"].contains("kind")) {
      const auto& kind = doc["meta"]["kind"];
      if (kind != "sweep_phase" && kind != "sweep_modulation") out.push_back("meta.kind: not a sweep");
    }
  }
  const std::size_t n1 = detail::axis_len(doc, "axis1"), n2 = detail::axis_len(doc, "axis2");
  if (!doc.contains("cells")) return out;
  const json& cells = doc["cells"];
  if (!cells.is_array() || cells.size() != n1) {
    out.push_back("cells: expected " + std::to_string(n1) + " rows");
    return out;
  }
  for (std::size_t i = 0; i < n1; ++i) {
    if (!cells[i].is_array() || cells[i].size() != n2) {
      out.push_back("cells[" + std::to_string(i) + "]: expected " + std::to_string(n2) + " entries");
      continue;
    }
    for (std::size_t j = 0; j < n2; ++j) {
      const std::string where = "cells[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      const json& c = cells[i][j];
      detail::exact_keys(c, {"chern_fhs", "chern_analytic_sign", "min_gap", "eta", "reliable", "note"}, where, out);
      if (!c.is_object()) continue;
      if (c.contains("chern_fhs") && !(c["chern_fhs"].is_null() || c["chern_fhs"].is_number_integer()))
        out.push_back(where + ".chern_fhs: expected integer or null");
      if (c.contains("chern_analytic_sign")) {
        const auto& s = c["chern_analytic_sign"];
        if (!s.is_number_integer() || std::abs(s.get<int>()) > 1) out.push_back(where + ".chern_analytic_sign: expected -1, 0 or 1");
      }
      if (c.contains("min_gap") && !detail::number_or_null(c["min_gap"])) out.push_back(where + ".min_gap: expected number or null");
      if (c.contains("eta")) {
        const auto& e = c["eta"];
        if (!detail::number_or_null(e) || (e.is_number() && std::abs(e.get<double>()) > 1.0 + 1e-12))
          out.push_back(where + ".eta: expected number in [-1, 1] or null");
      }
      if (c.contains("reliable") && !c["reliable"].is_boolean()) out.push_back(where + ".reliable: expected boolean");
      if (c.contains("note") && !c["note"].is_string()) out.push_back(where + ".note: expected string");
    }
  }
  return out;
}

/// spectrum-vs-f output.
inline Problems check_spectrum_map(const json& doc) {
  Problems out;
  detail::exact_keys(doc, {"axis1", "axis2", "absorption", "notes", "meta"}, "document", out);
  if (!doc.is_object()) return out;
  if (doc.contains("axis1")) detail::check_axis(doc["axis1"], "axis1", out);
  if (doc.contains("axis2")) detail::check_axis(doc["axis2"], "axis2", out);
  if (doc.contains("meta")) detail::check_meta(doc["meta"], {"velocity"}, out);
  if (doc.contains("notes") && !doc["notes"].is_array()) out.push_back("notes: expected array");
  const std::size_t n1 = detail::axis_len(doc, "axis1"), n2 = detail::axis_len(doc, "axis2");
  if (!doc.contains("absorption")) return out;
  const json& a = doc["absorption"];
  if (!a.is_array() || a.size() != n1) {
    out.push_back("absorption: expected " + std::to_string(n1) + " rows");
    return out;
  }
  for (std::size_t i = 0; i < n1; ++i) {
    if (!a[i].is_array() || a[i].size() != n2) {
      out.push_back("absorption[" + std::to_string(i) + "]: expected " + std::to_string(n2) + " entries");
      continue;
    }
    for (const auto& v : a[i])
      if (!(v.is_null() || (v.is_number() && v.get<double>() >= 0.0))) {
        out.push_back("absorption[" + std::to_string(i) + "]: entries must be >= 0 or null");
        break;
      }
  }
  return out;
}

/// dirac output.
inline Problems check_dirac(const json& doc) {
  Problems out;
  detail::exact_keys(doc, {"points", "unresolved", "rejected", "meta"}, "document", out);
  if (!doc.is_object()) return out;
  if (doc.contains("meta")) detail::check_meta(doc["meta"], {}, out);
  if (doc.contains("points")) {
    if (!doc["points"].is_array()) {
      out.push_back("points: expected array");
    } else {
      for (std::size_t i = 0; i < doc["points"].size(); ++i) {
        const json& p = doc["points"][i];
        const std::string where = "points[" + std::to_string(i) + "]";
        detail::exact_keys(p, {"position", "fractional", "chirality", "hz_sign", "gap_mhz", "in_plane_residual"},
                           where, out);
        if (!p.is_object()) continue;
        if (p.contains("position") && !detail::is_xy(p["position"])) out.push_back(where + ".position: expected [x, y]");
        if (p.contains("fractional") && !detail::is_xy(p["fractional"]))
          out.push_back(where + ".fractional: expected [s1, s2]");
        if (p.contains("chirality") && !(p["chirality"] == 1 || p["chirality"] == -1))
          out.push_back(where + ".chirality: expected +1 or -1");
        if (p.contains("hz_sign") && !(p["hz_sign"].is_number_integer() && std::abs(p["hz_sign"].get<int>()) <= 1))
          out.push_back(where + ".hz_sign: expected -1, 0 or 1");
        for (const char* k : {"gap_mhz", "in_plane_residual"})
          if (p.contains(k) && !(p[k].is_number() && p[k].get<double>() >= 0.0))
            out.push_back(where + "." + k + ": expected non-negative number");
      }
    }
  }
  if (doc.contains("unresolved")) {
    if (!doc["unresolved"].is_array())
      out.push_back("unresolved: expected array");
    else
      for (const auto& p : doc["unresolved"])
        if (!detail::is_xy(p)) out.push_back("unresolved: expected [x, y] entries");
  }
  if (doc.contains("rejected")) {
    if (!doc["rejected"].is_array())
      out.push_back("rejected: expected array");
    else
      for (const auto& r : doc["rejected"]) detail::exact_keys(r, {"position", "residual"}, "rejected[]", out);
  }
  return out;
}

inline Problems check_bands_csv(const std::string& text) {
  return detail::check_csv(text, kBandsCsvHeader, [](const std::vector<std::string>& f, std::size_t n, Problems& out) {
    for (const auto& x : f)
      if (!detail::parses_number(x)) {
        out.push_back("row " + std::to_string(n) + ": non-numeric field");
        return;
      }
  });
}

inline Problems check_spectrum_csv(const std::string& text) {
  return detail::check_csv(text, kSpectrumCsvHeader, [](const std::vector<std::string>& f, std::size_t n, Problems& out) {
    if (!detail::parses_number(f[0]) || !detail::parses_number(f[1]) || std::stod(f[1]) < 0.0)
      out.push_back("row " + std::to_string(n) + ": expected detuning and non-negative absorption");
  });
}

inline Problems check_phase_csv(const std::string& text) {
  return detail::check_csv(text, kPhaseCsvHeader, [](const std::vector<std::string>& f, std::size_t n, Problems& out) {
    const std::string where = "row " + std::to_string(n);
    if (!detail::parses_number(f[0]) || !detail::parses_number(f[1])) out.push_back(where + ": bad axis value");
    if (!f[2].empty() && !detail::parses_number(f[2])) out.push_back(where + ": bad chern_fhs");
    if (f[3] != "-1" && f[3] != "0" && f[3] != "1") out.push_back(where + ": bad chern_analytic_sign");
    if (!f[4].empty() && !detail::parses_number(f[4])) out.push_back(where + ": bad min_gap_mhz");
    if (!f[5].empty() && !detail::parses_number(f[5])) out.push_back(where + ": bad eta");
    if (f[6] != "true" && f[6] != "false") out.push_back(where + ": bad reliable");
  });
}

/// Dispatches on the document's meta.kind.
inline Problems check_json_document(const json& doc) {
  if (!doc.is_object() || !doc.contains("meta") || !doc["meta"].is_object() || !doc["meta"].contains("kind"))
    return {"document: missing meta.kind"};
  const auto kind = doc["meta"]["kind"];
  if (kind == "sweep_phase" || kind == "sweep_modulation") return check_phase_grid(doc);
  if (kind == "spectrum_vs_f") return check_spectrum_map(doc);
  if (kind == "dirac") return check_dirac(doc);
  return {"meta.kind: unknown document kind"};
}

}  // namespace slattice::schema

#endif
