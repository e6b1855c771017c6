#ifndef SLATTICE_HOPPINGS_HPP
#define SLATTICE_HOPPINGS_HPP

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "slattice/lattice.hpp"

namespace slattice {

/// Real-space hopping amplitudes of the effective honeycomb model.
///
/// t1 is the nearest-neighbour (a -> b) amplitude of the n = 0 block, which
/// equals Ω J_0(f) exactly. The third-order renormalization of the same bond
/// is reported separately in t1_correction. t2 is the complex b -> b
/// next-nearest-neighbour amplitude along k1 - k2. t3 is the a -> b hop
/// straight across the hexagon (k_i - k_j + k_l, all distinct) and t4 the
/// other third-neighbour class (2 k_i - k_j).
struct HoppingSet {
  double t1 = 0.0;
  double t1_correction = 0.0;
  cplx t2 = 0.0;
  double t3 = 0.0;
  double t4 = 0.0;
  double max_imaginary = 0.0;  // largest |Im| among t1, t3, t4 before taking Re
};

namespace detail {

// A harmonic exp(i Σ_j n_j k_j . r), stored by its integer weights.
using Weights = std::array<int, 3>;

// Coordinates of Σ n_j k_j - (Σ n_j) k1 on the (b1, b2) lattice, using
// k2 = k1 - b1 and k3 = k1 - b2.
inline std::array<int, 2> lattice_coords(const Weights& n) { return {-n[1], -n[2]}; }

inline std::vector<Weights> nn_class() { return {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}}; }

inline std::vector<Weights> nnn_class() {
  std::vector<Weights> out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) {
        Weights w{0, 0, 0};
        w[i] += 1;
        w[j] -= 1;
        out.push_back(w);
      }
  return out;
}

inline std::vector<Weights> across_class() {
  // k_i - k_j + k_l with {i, j, l} = {0, 1, 2}; fixed by the middle index.
  return {{-1, 1, 1}, {1, -1, 1}, {1, 1, -1}};
}

inline std::vector<Weights> skew_class() {
  std::vector<Weights> out;
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j) {
        Weights w{0, 0, 0};
        w[i] += 2;
        w[j] -= 1;
        out.push_back(w);
      }
  return out;
}

inline cplx dominant(const std::vector<cplx>& c) {
  cplx best = 0.0;
  for (const auto& v : c)
    if (std::abs(v) > std::abs(best) + 1e-12) best = v;
  return best;
}

}  // namespace detail

/// Fourier projection of the effective Hamiltonian sampled on a uniform
/// grid x grid mesh of the zone. The mesh must resolve lattice harmonics
/// up to coordinate 2, i.e. grid >= 5.
inline HoppingSet effective_hoppings(const LatticeConfig& cfg, int grid = 48) {
  constexpr int kMaxCoord = 2;
  if (grid < 2 * kMaxCoord + 1)
    throw ParameterError("effective_hoppings: grid " + std::to_string(grid) +
                         " cannot resolve third-neighbour harmonics (need >= 5)");
  const FloquetModel model(cfg);
  const auto& bz = model.zone();
  const std::size_t npts = static_cast<std::size_t>(grid) * grid;
  std::vector<cplx> lead(npts), full(npts);
  std::vector<double> hz(npts);
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const BlochPoint r = bz.point(double(i) / grid, double(j) / grid);
      const auto H = model.effective_hamiltonian(r, Expansion::third, true);
      const auto H0 = model.effective_hamiltonian(r, Expansion::leading, true);
      const std::size_t idx = static_cast<std::size_t>(i) * grid + j;
      full[idx] = H(1, 0);
      lead[idx] = H0(1, 0);
      hz[idx] = 0.5 * (H(1, 1).real() - H(0, 0).real());
    }

  auto coefficient = [&](auto&& sample, const detail::Weights& w) {
    const auto c = detail::lattice_coords(w);
    cplx acc = 0.0;
    for (int i = 0; i < grid; ++i)
      for (int j = 0; j < grid; ++j) {
        const double ph = -kTwoPi * (c[0] * double(i) + c[1] * double(j)) / grid;
        acc += sample(static_cast<std::size_t>(i) * grid + j) * std::polar(1.0, ph);
      }
    return acc / static_cast<double>(npts);
  };
  auto collect = [&](auto&& sample, const std::vector<detail::Weights>& cls) {
    std::vector<cplx> out;
    for (const auto& w : cls) out.push_back(coefficient(sample, w));
    return out;
  };
  auto lead_at = [&](std::size_t k) { return lead[k]; };
  auto full_at = [&](std::size_t k) { return full[k]; };
  auto corr_at = [&](std::size_t k) { return full[k] - lead[k]; };
  auto hz_at = [&](std::size_t k) { return cplx(hz[k], 0.0); };

  HoppingSet hs;
  const cplx t1 = coefficient(lead_at, {1, 0, 0});
  const cplx dt1 = detail::dominant(collect(corr_at, detail::nn_class()));
  const cplx t3 = detail::dominant(collect(full_at, detail::across_class()));
  const cplx t4 = detail::dominant(collect(full_at, detail::skew_class()));
  hs.t1 = t1.real();
  hs.t1_correction = dt1.real();
  hs.t2 = coefficient(hz_at, {1, -1, 0});
  hs.t3 = t3.real();
  hs.t4 = t4.real();
  hs.max_imaginary = std::max({std::abs(t1.imag()), std::abs(t3.imag()), std::abs(t4.imag())});
  return hs;
}

}  // namespace slattice

#endif
