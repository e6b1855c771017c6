#ifndef SLATTICE_LATTICE_HPP
#define SLATTICE_LATTICE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numeric>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slattice/bessel.hpp"
#include "slattice/brillouin.hpp"
#include "slattice/config.hpp"

namespace slattice {

/// Bloch vector of H_eff = identity + h . sigma, with sigma_z = |b><b| - |a><a|.
struct HVector {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;
  double identity = 0.0;  // reported separately, not part of h

  double norm() const { return std::sqrt(x * x + y * y + z * z); }
  double in_plane_norm() const { return std::hypot(x, y); }
  cplx in_plane() const { return {x, y}; }
};

/// Terms kept in the high-frequency expansion of the effective Hamiltonian.
/// `leading` keeps H_0 only, `second` adds the sum of [H_n, H_-n]/(n δ), and
/// `third` adds the 1/δ² double-commutator terms, which carry the longer-range
/// in-plane hoppings responsible for satellite Dirac points.
enum class Expansion { leading = 0, second = 1, third = 2 };

struct QuasiBands {
  std::array<double, 2> energy{};          // ascending, folded into (-δ/2, δ/2]
  std::array<Eigen::VectorXcd, 2> vector;  // full Floquet-space eigenvectors
  std::array<double, 2> central_weight{};  // weight in the m = 0 harmonic
  bool ambiguous = false;                  // selection tie (exact crossings)
};

/// Fold a quasi-energy into the first Floquet zone (-δ/2, δ/2].
inline double fold_quasienergy(double e, double delta) {
  double w = e - delta * std::floor(e / delta + 0.5);
  if (w <= -0.5 * delta) w += delta;
  if (w > 0.5 * delta) w -= delta;
  return w;
}

/// Floquet-modulated honeycomb lattice with cached Bessel/phase coefficients.
///
/// The time-dependent Bloch Hamiltonian in the basis (a, b) has
///   <b|H(t)|a> = Ω Σ_j exp[i(k_j.r + f sin(δt + φ_j))]
///              = Σ_n exp(inδt) Ω Σ_j J_n(f) exp(inφ_j) exp(ik_j.r),
/// so each Fourier block H_n is off-diagonal with <b|H_n|a> = g_n(r) and
/// <a|H_n|b> = conj(g_{-n}(r)), which makes H_{-n} = H_n^†.
class FloquetModel {
 public:
  explicit FloquetModel(const LatticeConfig& cfg)
      : cfg_(cfg.normalized()), zone_(cfg.geometry), n_(cfg.harmonics()) {
    cfg_.validate();
    const int span = 2 * n_;
    amp_.resize(2 * span + 1);
    for (int n = -span; n <= span; ++n) {
      const double jn = bessel_j(n, cfg_.f);
      for (int j = 0; j < 3; ++j)
        amp_[n + span][j] = cfg_.omega * jn * std::polar(1.0, n * cfg_.phi[j]);
    }
  }

  const LatticeConfig& config() const { return cfg_; }
  const BrillouinZone& zone() const { return zone_; }
  int harmonics() const { return n_; }

  /// True when Ω < δ, where the high-frequency expansion is meaningful.
  bool perturbative() const { return cfg_.omega < cfg_.delta; }

  /// Plane-wave factors exp(i k_j . r).
  std::array<cplx, 3> plane_waves(const BlochPoint& r) const {
    std::array<cplx, 3> w;
    for (int j = 0; j < 3; ++j) w[j] = std::polar(1.0, cfg_.geometry.k[j].dot(r));
    return w;
  }

  /// <b|H_n|a> at r. Valid for |n| <= 2 n_max (the range needed by the
  /// third-order expansion); use block() for the truncated Floquet blocks.
  cplx coupling(int n, const std::array<cplx, 3>& waves) const {
    const int span = 2 * n_;
    const auto& a = amp_[n + span];
    return a[0] * waves[0] + a[1] * waves[1] + a[2] * waves[2];
  }

  Eigen::Matrix2cd block(int n, const BlochPoint& r) const {
    if (std::abs(n) > n_)
      throw TruncationError("fourier block order " + std::to_string(n) +
                            " exceeds n_max = " + std::to_string(n_));
    return block_unchecked(n, plane_waves(r));
  }

  /// Dense Floquet matrix of dimension 2(2 n_max + 1). Index of
  /// (sublattice s, harmonic m) is 2 (m + n_max) + s with a = 0, b = 1.
  /// When `periodic_gauge` is set the b components carry exp(-i k1.r),
  /// which makes the matrix periodic on the zone torus.
  Eigen::MatrixXcd floquet_matrix(const BlochPoint& r, bool periodic_gauge = false) const {
    const int dim = 2 * (2 * n_ + 1);
    Eigen::MatrixXcd H = Eigen::MatrixXcd::Zero(dim, dim);
    auto waves = plane_waves(r);
    if (periodic_gauge) {
      const cplx u = std::conj(waves[0]);
      for (auto& w : waves) w *= u;
    }
    std::vector<cplx> g(2 * n_ + 1);
    for (int n = -n_; n <= n_; ++n) g[n + n_] = coupling(n, waves);
    for (int m = -n_; m <= n_; ++m) {
      for (int mp = -n_; mp <= n_; ++mp) {
        const int n = m - mp;
        if (std::abs(n) > n_) continue;
        const int row = 2 * (m + n_), col = 2 * (mp + n_);
        H(row + 1, col) = g[n + n_];                // <b,m|H|a,m'>
        H(row, col + 1) = std::conj(g[-n + n_]);    // <a,m|H|b,m'>
      }
      const int d = 2 * (m + n_);
      H(d, d) += m * cfg_.delta;
      H(d + 1, d + 1) += m * cfg_.delta;
    }
    return H;
  }

  /// Two bands with the largest weight in the m = 0 harmonic.
  QuasiBands quasienergy_bands(const BlochPoint& r, bool periodic_gauge = false) const {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(floquet_matrix(r, periodic_gauge));
    if (es.info() != Eigen::Success) throw NumericalError("Floquet diagonalization failed");
    const auto& V = es.eigenvectors();
    const int dim = static_cast<int>(V.rows());
    const int c = 2 * n_;
    std::vector<double> w(dim);
    for (int i = 0; i < dim; ++i) w[i] = std::norm(V(c, i)) + std::norm(V(c + 1, i));
    std::vector<int> order(dim);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return w[x] > w[y]; });

    QuasiBands out;
    out.ambiguous = dim > 2 && std::abs(w[order[1]] - w[order[2]]) < 1e-9;
    std::array<int, 2> pick{order[0], order[1]};
    if (es.eigenvalues()(pick[0]) > es.eigenvalues()(pick[1])) std::swap(pick[0], pick[1]);
    for (int i = 0; i < 2; ++i) {
      out.energy[i] = fold_quasienergy(es.eigenvalues()(pick[i]), cfg_.delta);
      out.vector[i] = V.col(pick[i]);
      out.central_weight[i] = w[pick[i]];
    }
    if (out.energy[0] > out.energy[1]) {
      std::swap(out.energy[0], out.energy[1]);
      std::swap(out.vector[0], out.vector[1]);
      std::swap(out.central_weight[0], out.central_weight[1]);
    }
    return out;
  }

  /// High-frequency (van Vleck) effective Hamiltonian in the basis (a, b):
  ///   H_0 + Σ_{m≠0} H_m H_{-m} / (mδ)
  ///       + Σ_{m≠0} [H_{-m}, [H_0, H_m]] / (2 m² δ²)
  ///       + Σ_{m≠0} Σ_{m'≠0,m} [H_{-m'}, [H_{m'-m}, H_m]] / (3 m m' δ²)
  /// with sums truncated at |m|, |m'| <= n_max.
  Eigen::Matrix2cd effective_hamiltonian(const BlochPoint& r,
                                         Expansion order = Expansion::third,
                                         bool periodic_gauge = false) const {
    auto waves = plane_waves(r);
    if (periodic_gauge) {
      const cplx u = std::conj(waves[0]);
      for (auto& w : waves) w *= u;
    }
    return effective_from_waves(waves, order);
  }

  HVector h_vector(const BlochPoint& r, Expansion order = Expansion::third,
                   bool periodic_gauge = false) const {
    return decompose(effective_hamiltonian(r, order, periodic_gauge));
  }

  static HVector decompose(const Eigen::Matrix2cd& H) {
    HVector h;
    const cplx ba = 0.5 * (H(1, 0) + std::conj(H(0, 1)));
    h.x = ba.real();
    h.y = ba.imag();
    h.z = 0.5 * (H(1, 1).real() - H(0, 0).real());
    h.identity = 0.5 * (H(1, 1).real() + H(0, 0).real());
    return h;
  }

 private:
  Eigen::Matrix2cd block_unchecked(int n, const std::array<cplx, 3>& waves) const {
    Eigen::Matrix2cd B = Eigen::Matrix2cd::Zero();
    B(1, 0) = coupling(n, waves);
    B(0, 1) = std::conj(coupling(-n, waves));
    return B;
  }

  Eigen::Matrix2cd effective_from_waves(const std::array<cplx, 3>& waves,
                                        Expansion order) const {
    const int span = 2 * n_;
    std::vector<Eigen::Matrix2cd> H(2 * span + 1);
    const int reach = order == Expansion::third ? span : n_;
    for (int n = -reach; n <= reach; ++n) H[n + span] = block_unchecked(n, waves);
    auto at = [&](int n) -> const Eigen::Matrix2cd& { return H[n + span]; };
    auto comm = [](const Eigen::Matrix2cd& A, const Eigen::Matrix2cd& B) -> Eigen::Matrix2cd {
      return A * B - B * A;
    };

    Eigen::Matrix2cd eff = at(0);
    if (order == Expansion::leading) return eff;
    const double d = cfg_.delta;
    for (int m = 1; m <= n_; ++m) eff += comm(at(m), at(-m)) / (m * d);
    if (order == Expansion::second) return eff;

    const double d2 = d * d;
    for (int m = -n_; m <= n_; ++m) {
      if (m == 0) continue;
      const Eigen::Matrix2cd inner0 = comm(at(0), at(m));
      eff += comm(at(-m), inner0) / (2.0 * m * m * d2);
      for (int mp = -n_; mp <= n_; ++mp) {
        if (mp == 0 || mp == m) continue;
        eff += comm(at(-mp), comm(at(mp - m), at(m))) / (3.0 * m * mp * d2);
      }
    }
    return eff;
  }

  LatticeConfig cfg_;
  BrillouinZone zone_;
  int n_;
  std::vector<std::array<cplx, 3>> amp_;
};

// Free-function surface over FloquetModel.

/// Instantaneous coupling field Ω Σ_j exp[i(k_j.r + f sin(δt + φ_j))].
inline cplx coupling_field(const LatticeConfig& cfg, const BlochPoint& r, double t) {
  cfg.validate();
  cplx sum = 0.0;
  for (int j = 0; j < 3; ++j)
    sum += std::polar(1.0, cfg.geometry.k[j].dot(r) + cfg.f * std::sin(cfg.delta * t + cfg.phi[j]));
  return cfg.omega * sum;
}

inline Eigen::Matrix2cd fourier_block(const LatticeConfig& cfg, const BlochPoint& r, int n) {
  return FloquetModel(cfg).block(n, r);
}

inline Eigen::MatrixXcd build_floquet_matrix(const LatticeConfig& cfg, const BlochPoint& r) {
  return FloquetModel(cfg).floquet_matrix(r);
}

inline QuasiBands quasienergy_bands(const LatticeConfig& cfg, const BlochPoint& r) {
  return FloquetModel(cfg).quasienergy_bands(r);
}

inline HVector effective_h_vector(const LatticeConfig& cfg, const BlochPoint& r,
                                  Expansion order = Expansion::third) {
  return FloquetModel(cfg).h_vector(r, order);
}

}  // namespace slattice

#endif
