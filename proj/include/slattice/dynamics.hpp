#ifndef SLATTICE_DYNAMICS_HPP
#define SLATTICE_DYNAMICS_HPP

#include <cmath>
#include <complex>
#include <deque>
#include <map>
#include <optional>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <Eigen/SparseLU>
#ifdef SLATTICE_HAVE_UMFPACK
#include <Eigen/UmfPackSupport>
#endif

#include "slattice/bessel.hpp"
#include "slattice/config.hpp"
#include "slattice/parallel.hpp"

namespace slattice {

/// Sign relating the superradiance contrast to the Chern number with the
/// k+ = k_p + k1 - k2 labeling and the default geometry: at the reference
/// point Ω = 10 MHz, δ = 80 MHz, f = 1, φ = (0, 2π/3, 4π/3), Δ_p = 0, v = 0
/// the lattice has C = +1 and η > 0.
inline constexpr int kEtaChernSign = +1;

enum class Sublattice { a = 0, b = 1 };

/// A timed-Dicke-state node. b(m, n) carries momentum k_p + m b1 + n b2 and
/// a(m, n) carries k_p + m b1 + n b2 - k1, with b1 = k1 - k2, b2 = k1 - k3.
struct Site {
  Sublattice sublattice = Sublattice::b;
  int m = 0;
  int n = 0;
  Vec2 momentum = Vec2::Zero();  // relative to k_p
};

/// Nearest-neighbour bond generated by coupling field `field` (0, 1, 2):
/// a photon of field j turns a(q) into b(q + k_j).
struct Edge {
  int b_site = 0;
  int a_site = 0;
  int field = 0;
};

struct SiteGraph {
  std::vector<Site> sites;
  std::vector<Edge> edges;
  int origin = 0;   // b at k_p
  int k_plus = 0;   // b at k_p + k1 - k2
  int k_minus = 0;  // b at k_p + k1 - k3
  int n_shells = 0;

  std::size_t size() const { return sites.size(); }
};

/// Honeycomb sites within graph distance 2 n_shells of the origin b-site.
inline SiteGraph build_site_graph(const LatticeConfig& cfg) {
  if (cfg.n_shells < 1) throw ParameterError("n_shells must be >= 1");
  const Vec2 b1 = cfg.geometry.k[0] - cfg.geometry.k[1];
  const Vec2 b2 = cfg.geometry.k[0] - cfg.geometry.k[2];
  using Key = std::tuple<int, int, int>;  // sublattice, m, n

  // neighbours with the field index of the bond
  auto neighbours = [](const Key& s) {
    const auto [sub, m, n] = s;
    if (sub == 0) return std::array<std::pair<Key, int>, 3>{{{{1, m, n}, 0}, {{1, m - 1, n}, 1}, {{1, m, n - 1}, 2}}};
    return std::array<std::pair<Key, int>, 3>{{{{0, m, n}, 0}, {{0, m + 1, n}, 1}, {{0, m, n + 1}, 2}}};
  };

  SiteGraph g;
  g.n_shells = cfg.n_shells;
  std::map<Key, int> index;
  std::deque<std::pair<Key, int>> queue;
  const int radius = 2 * cfg.n_shells;
  auto add = [&](const Key& k) {
    const auto [sub, m, n] = k;
    Site s;
    s.sublattice = sub == 0 ? Sublattice::a : Sublattice::b;
    s.m = m;
    s.n = n;
    s.momentum = m * b1 + n * b2 - (sub == 0 ? cfg.geometry.k[0] : Vec2::Zero());
    index[k] = static_cast<int>(g.sites.size());
    g.sites.push_back(s);
  };
  add({1, 0, 0});
  queue.emplace_back(Key{1, 0, 0}, 0);
  while (!queue.empty()) {
    const auto [key, dist] = queue.front();
    queue.pop_front();
    if (dist == radius) continue;
    for (const auto& [nb, field] : neighbours(key)) {
      if (index.count(nb)) continue;
      add(nb);
      queue.emplace_back(nb, dist + 1);
    }
  }
  for (const auto& [key, idx] : index) {
    if (std::get<0>(key) != 0) continue;
    for (const auto& [nb, field] : neighbours(key)) {
      const auto it = index.find(nb);
      if (it != index.end()) g.edges.push_back({it->second, idx, field});
    }
  }
  g.origin = index.at({1, 0, 0});
  g.k_plus = index.at({1, 1, 0});
  g.k_minus = index.at({1, 0, 1});
  return g;
}

struct SteadyStateResult {
  Eigen::VectorXcd amplitudes;  // index site * (2 n_max + 1) + (m + n_max)
  int harmonics = 0;
  std::optional<double> eta;    // empty when |c+|² + |c-|² < 1e-15
  double absorption = 0.0;
  double residual = 0.0;

  cplx amplitude(int site, int m) const {
    return amplitudes(site * (2 * harmonics + 1) + (m + harmonics));
  }
};

/// Linear response of the Floquet-extended momentum-space lattice to a unit
/// probe drive on (origin b-site, m = 0). Unknowns c_{site,m} solve
///   [(Δ_p - mδ - ε_site) + iγ_site/2] c_{site,m} - Σ couplings c' = s,
/// where ε_site = v times the x-component of the site momentum and the bond
/// of field j links (b, m) to (a, m - n) with weight Ω J_n(f) exp(inφ_j).
class SteadyStateSolver {
 public:
  explicit SteadyStateSolver(const LatticeConfig& cfg, double velocity = 0.0)
      : cfg_(cfg.normalized()), velocity_(velocity) {
    cfg_.validate(true);
    if (cfg_.gamma_b <= 0.0 && cfg_.gamma_a <= 0.0)
      throw ConfigurationError("steady state needs gamma_b > 0 or gamma_a > 0");
    if (!std::isfinite(velocity)) throw ParameterError("velocity must be finite");
    graph_ = build_site_graph(cfg_);
    n_ = cfg_.harmonics();
    const int M = 2 * n_ + 1;
    dim_ = static_cast<int>(graph_.size()) * M;

    std::vector<std::vector<cplx>> weight(3, std::vector<cplx>(2 * n_ + 1));
    for (int n = -n_; n <= n_; ++n) {
      const double jn = bessel_j(n, cfg_.f);
      for (int j = 0; j < 3; ++j) weight[j][n + n_] = cfg_.omega * jn * std::polar(1.0, n * cfg_.phi[j]);
    }
    couplings_.reserve(graph_.edges.size() * M * M * 2);
    for (const auto& e : graph_.edges)
      for (int m = -n_; m <= n_; ++m)
        for (int mp = -n_; mp <= n_; ++mp) {
          const int n = m - mp;
          if (std::abs(n) > n_) continue;
          const cplx w = weight[e.field][n + n_];
          if (std::abs(w) < 1e-15 * std::max(1.0, cfg_.omega)) continue;
          const int row = index(e.b_site, m), col = index(e.a_site, mp);
          couplings_.emplace_back(row, col, -w);
          couplings_.emplace_back(col, row, -std::conj(w));
        }
    base_diag_.resize(dim_);
    for (int s = 0; s < static_cast<int>(graph_.size()); ++s) {
      const auto& site = graph_.sites[s];
      const double gamma = site.sublattice == Sublattice::b ? cfg_.gamma_b : cfg_.gamma_a;
      const double shift = velocity_ * site.momentum.x();
      for (int m = -n_; m <= n_; ++m)
        base_diag_(index(s, m)) = cplx(-m * cfg_.delta - shift, 0.5 * gamma);
    }
  }

  const SiteGraph& graph() const { return graph_; }
  const LatticeConfig& config() const { return cfg_; }
  int harmonics() const { return n_; }
  int dimension() const { return dim_; }

  int index(int site, int m) const { return site * (2 * n_ + 1) + (m + n_); }

  /// Steady state for drive vector `drive` (defaults to the unit probe).
  SteadyStateResult solve(double delta_p, const Eigen::VectorXcd* drive = nullptr) const {
    if (!std::isfinite(delta_p)) throw ParameterError("probe detuning must be finite");
    Eigen::SparseMatrix<cplx> A(dim_, dim_);
    std::vector<Eigen::Triplet<cplx>> trips(couplings_);
    trips.reserve(couplings_.size() + dim_);
    for (int i = 0; i < dim_; ++i) trips.emplace_back(i, i, base_diag_(i) + delta_p);
    A.setFromTriplets(trips.begin(), trips.end());
    A.makeCompressed();

    Eigen::VectorXcd s;
    if (drive) {
      if (drive->size() != dim_) throw ParameterError("drive vector has wrong dimension");
      s = *drive;
    } else {
      s = Eigen::VectorXcd::Zero(dim_);
      s(index(graph_.origin, 0)) = 1.0;
    }

    // UMFPACK's multifrontal factorization is several times faster on these
    // lattice-shaped systems; SparseLU is the dependency-free fallback.
#ifdef SLATTICE_HAVE_UMFPACK
    Eigen::UmfPackLU<Eigen::SparseMatrix<cplx>> lu;
#else
    Eigen::SparseLU<Eigen::SparseMatrix<cplx>, Eigen::COLAMDOrdering<int>> lu;
#endif
    lu.compute(A);
    if (lu.info() != Eigen::Success) throw NumericalError("steady state: singular system");
    SteadyStateResult r;
    r.amplitudes = lu.solve(s);
    r.harmonics = n_;
    const double snorm = s.norm();
    r.residual = (A * r.amplitudes - s).norm();
    if (!(r.residual < 1e-9 * std::max(snorm, 1e-300)))
      throw NumericalError("steady state: residual " + std::to_string(r.residual) + " above tolerance");
    const double pp = std::norm(r.amplitude(graph_.k_plus, 0));
    const double pm = std::norm(r.amplitude(graph_.k_minus, 0));
    if (pp + pm >= 1e-15) r.eta = (pp - pm) / (pp + pm);
    r.absorption = -r.amplitude(graph_.origin, 0).imag() * cfg_.gamma_b;
    return r;
  }

 private:
  LatticeConfig cfg_;
  double velocity_;
  SiteGraph graph_;
  int n_ = 0;
  int dim_ = 0;
  std::vector<Eigen::Triplet<cplx>> couplings_;
  Eigen::VectorXcd base_diag_;
};

/// Name of the sparse backend compiled in.
inline const char* sparse_backend() {
#ifdef SLATTICE_HAVE_UMFPACK
  return "umfpack";
#else
  return "eigen-sparselu";
#endif
}

inline SteadyStateResult steady_state(const LatticeConfig& cfg, double delta_p, double v = 0.0) {
  return SteadyStateSolver(cfg, v).solve(delta_p);
}

/// η = (|c+|² - |c-|²) / (|c+|² + |c-|²). Throws NumericalError when both
/// emission channels vanish and η is undefined.
inline double superradiance_contrast(const LatticeConfig& cfg, double delta_p, double v = 0.0) {
  const auto r = steady_state(cfg, delta_p, v);
  if (!r.eta) throw NumericalError("superradiance contrast undefined: no emission into k+/k-");
  return *r.eta;
}

/// Probe absorption -γ_b Im c(origin, m = 0) on each detuning.
inline std::vector<double> absorption_spectrum(const LatticeConfig& cfg,
                                               const std::vector<double>& delta_grid,
                                               double v = 0.0, int jobs = 1) {
  const SteadyStateSolver solver(cfg, v);
  std::vector<double> out(delta_grid.size());
  parallel_for(delta_grid.size(), jobs, [&](std::size_t i) {
    const double a = solver.solve(delta_grid[i]).absorption;
    if (a < -1e-9)
      throw NumericalError("negative absorption " + std::to_string(a) + " at detuning " +
                           std::to_string(delta_grid[i]));
    out[i] = std::max(a, 0.0);
  });
  return out;
}

/// Gauss-Hermite nodes and weights for ∫ exp(-x²) g(x) dx (Golub-Welsch).
inline std::pair<std::vector<double>, std::vector<double>> gauss_hermite(int n) {
  if (n < 1) throw ParameterError("gauss_hermite: need at least one node");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) J(i, i - 1) = J(i - 1, i) = std::sqrt(0.5 * i);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  std::vector<double> x(n), w(n);
  for (int i = 0; i < n; ++i) {
    x[i] = es.eigenvalues()(i);
    w[i] = std::sqrt(kPi) * es.eigenvectors()(0, i) * es.eigenvectors()(0, i);
  }
  return {x, w};
}

/// Contrast from emission intensities averaged over a Gaussian velocity
/// distribution with standard deviation sigma_v (MHz per unit wavevector).
inline double doppler_averaged_contrast(const LatticeConfig& cfg, double delta_p, double sigma_v,
                                        int nodes = 16) {
  if (!(sigma_v >= 0.0)) throw ParameterError("sigma_v must be >= 0");
  if (sigma_v == 0.0) return superradiance_contrast(cfg, delta_p, 0.0);
  const auto [x, w] = gauss_hermite(nodes);
  double pp = 0.0, pm = 0.0;
  for (int i = 0; i < nodes; ++i) {
    const SteadyStateSolver solver(cfg, std::sqrt(2.0) * sigma_v * x[i]);
    const auto r = solver.solve(delta_p);
    pp += w[i] * std::norm(r.amplitude(solver.graph().k_plus, 0));
    pm += w[i] * std::norm(r.amplitude(solver.graph().k_minus, 0));
  }
  if (pp + pm < 1e-15) throw NumericalError("averaged contrast undefined");
  return (pp - pm) / (pp + pm);
}

}  // namespace slattice

#endif
