#ifndef SLATTICE_IO_HPP
#define SLATTICE_IO_HPP

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "json.hpp"
#include "slattice/config.hpp"

namespace slattice {

using json = nlohmann::json;

#ifdef SLATTICE_VERSION_STRING
inline constexpr const char* kVersion = SLATTICE_VERSION_STRING;
#else
inline constexpr const char* kVersion = "0.0.0";
#endif

/// Config-file problem with the offending key path and (1-based) source line,
/// or line 0 when the location is unknown.
struct ConfigParseError : ConfigurationError {
  ConfigParseError(std::string path, int line, const std::string& what)
      : ConfigurationError(format(path, line, what)), key_path(std::move(path)), line(line) {}
  std::string key_path;
  int line = 0;

 private:
  static std::string format(const std::string& path, int line, const std::string& what) {
    std::string s = "config";
    if (!path.empty()) s += " key '" + path + "'";
    if (line > 0) s += " (line " + std::to_string(line) + ")";
    return s + ": " + what;
  }
};

namespace detail {

inline int line_of_offset(const std::string& text, std::size_t offset) {
  offset = std::min(offset, text.size());
  return 1 + static_cast<int>(std::count(text.begin(), text.begin() + static_cast<long>(offset), '\n'));
}

/// Line on which a dotted key path first appears. Each component is looked up
/// after the position of its parent, which is exact for the shallow config
/// documents this reads.
inline int line_of_key(const std::string& text, const std::string& path) {
  std::size_t pos = 0;
  std::size_t start = 0;
  while (start <= path.size()) {
    const std::size_t dot = path.find('.', start);
    std::string part = path.substr(start, dot == std::string::npos ? std::string::npos : dot - start);
    part = part.substr(0, part.find('['));
    const std::size_t at = text.find("\"" + part + "\"", pos);
    if (at == std::string::npos) return 0;
    pos = at;
    if (dot == std::string::npos) break;
    start = dot + 1;
  }
  return line_of_offset(text, pos);
}

inline double require_number(const json& v, const std::string& path, const std::string& text) {
  if (!v.is_number()) throw ConfigParseError(path, line_of_key(text, path), "expected a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigParseError(path, line_of_key(text, path), "must be finite");
  return x;
}

inline Vec2 require_vec2(const json& v, const std::string& path, const std::string& text) {
  if (!v.is_array() || v.size() != 2)
    throw ConfigParseError(path, line_of_key(text, path), "expected an array of 2 numbers");
  return Vec2(require_number(v[0], path + "[0]", text), require_number(v[1], path + "[1]", text));
}

}  // namespace detail

inline const std::set<std::string>& config_keys() {
  static const std::set<std::string> keys{"omega_mhz",   "f",           "delta_mhz", "phi",     "geometry",
                                          "gamma_b_mhz", "gamma_a_mhz", "n_max",     "n_shells"};
  return keys;
}

/// Applies the keys present in `doc` on top of `cfg`. `text` is the source
/// the document came from and is only used to locate errors.
inline void apply_config_json(LatticeConfig& cfg, const json& doc, const std::string& text) {
  if (!doc.is_object()) throw ConfigParseError("", 1, "top level must be a JSON object");
  for (const auto& [key, _] : doc.items())
    if (!config_keys().count(key))
      throw ConfigParseError(key, detail::line_of_key(text, key), "unknown key");
  if (doc.contains("omega_mhz")) cfg.omega = detail::require_number(doc["omega_mhz"], "omega_mhz", text);
  if (doc.contains("f")) cfg.f = detail::require_number(doc["f"], "f", text);
  if (doc.contains("delta_mhz")) cfg.delta = detail::require_number(doc["delta_mhz"], "delta_mhz", text);
  if (doc.contains("gamma_b_mhz")) cfg.gamma_b = detail::require_number(doc["gamma_b_mhz"], "gamma_b_mhz", text);
  if (doc.contains("gamma_a_mhz")) cfg.gamma_a = detail::require_number(doc["gamma_a_mhz"], "gamma_a_mhz", text);
  if (doc.contains("phi")) {
    const auto& p = doc["phi"];
    if (!p.is_array() || p.size() != 3)
      throw ConfigParseError("phi", detail::line_of_key(text, "phi"), "expected an array of 3 numbers (radians)");
    for (int j = 0; j < 3; ++j) cfg.phi[j] = detail::require_number(p[j], "phi[" + std::to_string(j) + "]", text);
  }
  if (doc.contains("geometry")) {
    const auto& g = doc["geometry"];
    if (g.is_string()) {
      if (g.get<std::string>() != "symmetric")
        throw ConfigParseError("geometry", detail::line_of_key(text, "geometry"),
                               "expected \"symmetric\" or an object with k1, k2, k3");
      cfg.geometry = Geometry::make_symmetric();
    } else if (g.is_object()) {
      for (const auto& [key, _] : g.items())
        if (key != "k1" && key != "k2" && key != "k3")
          throw ConfigParseError("geometry." + key, detail::line_of_key(text, "geometry." + key), "unknown key");
      std::array<Vec2, 3> k;
      for (int j = 0; j < 3; ++j) {
        const std::string name = "k" + std::to_string(j + 1);
        if (!g.contains(name)) throw ConfigParseError("geometry." + name, 0, "required key missing");
        k[j] = detail::require_vec2(g[name], "geometry." + name, text);
      }
      cfg.geometry = Geometry::make_custom(k[0], k[1], k[2]);
    } else {
      throw ConfigParseError("geometry", detail::line_of_key(text, "geometry"),
                             "expected \"symmetric\" or an object with k1, k2, k3");
    }
  }
  if (doc.contains("n_max")) {
    const auto& v = doc["n_max"];
    if (v.is_string() && v.get<std::string>() == "auto") {
      cfg.n_max = 0;
    } else if (v.is_number_integer() && v.get<long long>() >= 1 && v.get<long long>() <= 32) {
      cfg.n_max = v.get<int>();
    } else {
      throw ConfigParseError("n_max", detail::line_of_key(text, "n_max"), "expected \"auto\" or an integer in [1, 32]");
    }
  }
  if (doc.contains("n_shells")) {
    const auto& v = doc["n_shells"];
    if (!v.is_number_integer() || v.get<long long>() < 1 || v.get<long long>() > 64)
      throw ConfigParseError("n_shells", detail::line_of_key(text, "n_shells"), "expected an integer in [1, 64]");
    cfg.n_shells = v.get<int>();
  }
}

inline json parse_json_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw ConfigParseError("", detail::line_of_offset(text, e.byte == 0 ? 0 : e.byte - 1),
                           std::string("malformed JSON: ") + e.what());
  }
}

/// Parses a config document. omega_mhz and f are required; every other key
/// falls back to the LatticeConfig default. Unknown keys are rejected.
inline LatticeConfig config_from_json_text(const std::string& text) {
  const json doc = parse_json_text(text);
  LatticeConfig cfg;
  apply_config_json(cfg, doc, text);
  for (const char* req : {"omega_mhz", "f"})
    if (!doc.contains(req)) throw ConfigParseError(req, 0, "required key missing");
  return cfg;
}

inline std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigParseError("", 0, "cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline LatticeConfig load_config(const std::string& path) { return config_from_json_text(read_text_file(path)); }

/// Full config snapshot using the config-file key names.
inline json config_to_json(const LatticeConfig& cfg) {
  json j;
  j["omega_mhz"] = cfg.omega;
  j["f"] = cfg.f;
  j["delta_mhz"] = cfg.delta;
  j["phi"] = {cfg.phi[0], cfg.phi[1], cfg.phi[2]};
  if (cfg.geometry.symmetric) {
    j["geometry"] = "symmetric";
  } else {
    json g;
    for (int i = 0; i < 3; ++i)
      g["k" + std::to_string(i + 1)] = {cfg.geometry.k[i].x(), cfg.geometry.k[i].y()};
    j["geometry"] = g;
  }
  j["gamma_b_mhz"] = cfg.gamma_b;
  j["gamma_a_mhz"] = cfg.gamma_a;
  if (cfg.n_max == 0)
    j["n_max"] = "auto";
  else
    j["n_max"] = cfg.n_max;
  j["n_shells"] = cfg.n_shells;
  return j;
}

inline LatticeConfig config_from_json(const json& j) { return config_from_json_text(j.dump()); }

/// UTC time in ISO-8601 form, e.g. 2024-05-01T12:00:00Z.
inline std::string utc_timestamp() {
  const std::time_t t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

/// Writes `text` to `path`, or to stdout when path is "-".
inline void write_text(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigurationError("cannot write '" + path + "'");
  out << text;
  if (!out) throw ConfigurationError("write failed for '" + path + "'");
}

/// Fixed-precision number for CSV output; round-trips doubles exactly.
inline std::string csv_number(double x) {
  if (!std::isfinite(x)) return "nan";
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

}  // namespace slattice

#endif
