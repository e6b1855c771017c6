#ifndef SLATTICE_OUTPUT_HPP
#define SLATTICE_OUTPUT_HPP

#include <sstream>
#include <string>
#include <vector>

#include "slattice/brillouin.hpp"
#include "slattice/io.hpp"
#include "slattice/topology.hpp"

namespace slattice {

inline constexpr const char* kBandsCsvHeader =
    "index,path_length,x,y,energy_lower_mhz,energy_upper_mhz,sigma_z_lower,sigma_z_upper";
inline constexpr const char* kSpectrumCsvHeader = "delta_p_mhz,absorption";

inline json run_meta(const std::string& kind, const LatticeConfig& cfg, const std::string& timestamp = "") {
  return json{{"kind", kind},
              {"config", config_to_json(cfg)},
              {"version", kVersion},
              {"timestamp", timestamp.empty() ? utc_timestamp() : timestamp}};
}

/// Dirac-point list with positions in both Cartesian and fractional
/// (reciprocal-basis) coordinates.
inline json to_json(const DiracSearch& s, const BrillouinZone& bz, json meta) {
  auto xy = [](const BlochPoint& p) { return json::array({p.x(), p.y()}); };
  json pts = json::array();
  for (const auto& d : s.points) {
    const Vec2 fr = bz.fractional(d.position);
    pts.push_back({{"position", xy(d.position)},
                   {"fractional", json::array({fr.x(), fr.y()})},
                   {"chirality", d.chirality},
                   {"hz_sign", d.hz_sign},
                   {"gap_mhz", d.gap},
                   {"in_plane_residual", d.in_plane_residual}});
  }
  json unresolved = json::array();
  for (const auto& p : s.unresolved) unresolved.push_back(xy(p));
  json rejected = json::array();
  for (const auto& [p, res] : s.rejected) rejected.push_back({{"position", xy(p)}, {"residual", res}});
  return json{{"points", pts}, {"unresolved", unresolved}, {"rejected", rejected}, {"meta", std::move(meta)}};
}

/// Band energies and sublattice polarization along a path; path_length is
/// the cumulative Euclidean distance from the first sample.
inline std::string bands_csv(const std::vector<PolarizationSample>& samples) {
  std::ostringstream os;
  os << kBandsCsvHeader << '\n';
  double s = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& p = samples[i];
    if (i > 0) s += (p.position - samples[i - 1].position).norm();
    os << i << ',' << csv_number(s) << ',' << csv_number(p.position.x()) << ',' << csv_number(p.position.y()) << ','
       << csv_number(p.energy[0]) << ',' << csv_number(p.energy[1]) << ',' << csv_number(p.sigma_z[0]) << ','
       << csv_number(p.sigma_z[1]) << '\n';
  }
  return os.str();
}

inline std::string spectrum_csv(const std::vector<double>& delta, const std::vector<double>& absorption) {
  if (delta.size() != absorption.size()) throw ParameterError("spectrum_csv: size mismatch");
  std::ostringstream os;
  os << kSpectrumCsvHeader << '\n';
  for (std::size_t i = 0; i < delta.size(); ++i) os << csv_number(delta[i]) << ',' << csv_number(absorption[i]) << '\n';
  return os.str();
}

}  // namespace slattice

#endif
