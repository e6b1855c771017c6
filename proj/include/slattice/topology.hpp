#ifndef SLATTICE_TOPOLOGY_HPP
#define SLATTICE_TOPOLOGY_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "slattice/bessel.hpp"
#include "slattice/lattice.hpp"

namespace slattice {

struct DiracPoint {
  BlochPoint position = BlochPoint::Zero();
  int chirality = 0;   // +1 / -1
  int hz_sign = 0;     // 0 when gap is below the gap tolerance
  double gap = 0.0;    // 2 |h_z| (MHz)
  double in_plane_residual = 0.0;
};

/// Result of a Dirac-point search. Candidates whose Newton refinement hit
/// the iteration limit go to `unresolved`; candidates that converged to a
/// nonzero local minimum of |h_x + i h_y| go to `rejected` with their
/// residual. Nothing is dropped silently.
struct DiracSearch {
  std::vector<DiracPoint> points;
  std::vector<BlochPoint> unresolved;
  std::vector<std::pair<BlochPoint, double>> rejected;
};

struct DiracOptions {
  int grid = 96;
  int max_iterations = 100;
  double merge_tolerance = 1e-4;
  double gap_tolerance = 1e-3;  // relative to Ω
  Expansion order = Expansion::third;
};

enum class ChernMethod { dp_counting, small_f, bessel_sum, fhs_wilson };

inline std::string to_string(ChernMethod m) {
  switch (m) {
    case ChernMethod::dp_counting: return "dp_counting";
    case ChernMethod::small_f: return "small_f";
    case ChernMethod::bessel_sum: return "bessel_sum";
    case ChernMethod::fhs_wilson: return "fhs_wilson";
  }
  return "unknown";
}

struct ChernResult {
  int value = 0;
  ChernMethod method = ChernMethod::fhs_wilson;
  double min_gap = 0.0;   // MHz
  bool reliable = false;
  double residual = 0.0;  // distance of the raw flux sum from value (fhs only)
  std::string note;
};

enum class BandSource { effective, floquet };

struct FhsOptions {
  BandSource source = BandSource::effective;
  Expansion order = Expansion::third;
  double gap_tolerance = 1e-6;  // relative to Ω
};

struct PolarizationSample {
  BlochPoint position = BlochPoint::Zero();
  std::array<double, 2> energy{};     // lower, upper (MHz)
  std::array<double, 2> sigma_z{};    // <σ_z> of lower, upper
};

struct GapResult {
  double gap = 0.0;
  BlochPoint argmin = BlochPoint::Zero();
};

namespace detail {

inline Vec2 in_plane(const FloquetModel& m, const BlochPoint& r, Expansion order) {
  const HVector h = m.h_vector(r, order);
  return Vec2(h.x, h.y);
}

// Jacobian of (h_x, h_y) with respect to physical (x, y), central differences.
inline Eigen::Matrix2d in_plane_jacobian(const FloquetModel& m, const BlochPoint& r,
                                         double step, Expansion order) {
  Eigen::Matrix2d J;
  for (int c = 0; c < 2; ++c) {
    BlochPoint dr = BlochPoint::Zero();
    dr[c] = step;
    J.col(c) = (in_plane(m, r + dr, order) - in_plane(m, r - dr, order)) / (2.0 * step);
  }
  return J;
}

inline int sign_of(double v, double tol = 0.0) {
  if (v > tol) return 1;
  if (v < -tol) return -1;
  return 0;
}

}  // namespace detail

/// Winding sign of the in-plane field at an in-plane zero p, the sign of
/// (∂_x h × ∂_y h)_z. Two finite-difference steps must agree.
inline int chirality(const FloquetModel& model, const BlochPoint& p,
                     Expansion order = Expansion::third) {
  const double d1 = detail::in_plane_jacobian(model, p, 1e-4, order).determinant();
  const double d2 = detail::in_plane_jacobian(model, p, 1e-5, order).determinant();
  if (std::abs(d1) < 1e-8 || std::abs(d2) < 1e-8)
    throw NumericalError("chirality: degenerate cone (vanishing Jacobian)");
  if ((d1 > 0) != (d2 > 0))
    throw NumericalError("chirality: finite-difference steps disagree");
  return d1 > 0 ? 1 : -1;
}

inline int chirality(const LatticeConfig& cfg, const BlochPoint& p) {
  return chirality(FloquetModel(cfg), p);
}

/// All zeros of h_x + i h_y in one zone: grid scan for local minima of
/// |h_x + i h_y|², then Levenberg-Marquardt refinement with steps clamped
/// to a tenth of the zone diameter.
inline DiracSearch find_dirac_points(const FloquetModel& model, const DiracOptions& opt = {}) {
  if (opt.grid < 8) throw ParameterError("find_dirac_points: grid must be >= 8");
  const auto& bz = model.zone();
  const double omega = model.config().omega;
  const int G = opt.grid;
  std::vector<double> mag(static_cast<std::size_t>(G) * G);
  auto at = [&](int i, int j) -> double& {
    i = (i % G + G) % G;
    j = (j % G + G) % G;
    return mag[static_cast<std::size_t>(i) * G + j];
  };
  // Offset by half a cell so the grid does not sit exactly on K, K'.
  auto grid_point = [&](int i, int j) { return bz.point((i + 0.5) / G, (j + 0.5) / G); };
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) at(i, j) = detail::in_plane(model, grid_point(i, j), opt.order).squaredNorm();

  std::vector<BlochPoint> candidates;
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) {
      const double v = at(i, j);
      bool is_min = true;
      for (int di = -1; di <= 1 && is_min; ++di)
        for (int dj = -1; dj <= 1; ++dj) {
          if (!di && !dj) continue;
          const double w = at(i + di, j + dj);
          // ties broken by scan order so plateaus give one candidate
          if (w < v || (w == v && (di < 0 || (di == 0 && dj < 0)))) {
            is_min = false;
            break;
          }
        }
      if (is_min) candidates.push_back(grid_point(i, j));
    }

  DiracSearch out;
  const double clamp = 0.1 * bz.diameter();
  const double converged = 1e-11 * omega;
  const double genuine = 1e-6 * omega;
  for (BlochPoint r : candidates) {
    Vec2 F = detail::in_plane(model, r, opt.order);
    double fnorm = F.norm();
    bool done = fnorm < converged;
    bool stalled = false;
    int it = 0;
    double lambda = -1.0;
    // Convergence to a zero is at least linear with rate 1/2 (quadratic for a
    // regular cone); crawling by < 0.1% over 10 iterations means the iterate is
    // sliding along a valley towards a nonzero minimum.
    std::vector<double> history;
    for (; it < opt.max_iterations && !done && !stalled; ++it) {
      history.push_back(fnorm);
      if (history.size() > 10 && fnorm > (1.0 - 1e-3) * history[history.size() - 11]) {
        stalled = true;
        break;
      }
      const Eigen::Matrix2d J = detail::in_plane_jacobian(model, r, 1e-6, opt.order);
      const Eigen::Matrix2d JtJ = J.transpose() * J;
      const Vec2 grad = J.transpose() * F;
      if (!grad.allFinite()) {
        stalled = true;
        break;
      }
      // a stationary point of |F|² with F ≠ 0 is a nonzero local minimum
      if (grad.norm() <= 1e-10 * J.norm() * fnorm) {
        stalled = true;
        break;
      }
      if (lambda < 0) lambda = 1e-6 * JtJ.trace();
      bool improved = false;
      for (int k = 0; k < 60; ++k) {
        Vec2 step = -(JtJ + lambda * Eigen::Matrix2d::Identity()).ldlt().solve(grad);
        if (step.norm() > clamp) step *= clamp / step.norm();
        const BlochPoint trial = r + step;
        const Vec2 Ft = detail::in_plane(model, trial, opt.order);
        if (Ft.norm() < fnorm) {
          improved = fnorm - Ft.norm() > 1e-12 * fnorm || Ft.norm() < converged;
          r = trial;
          F = Ft;
          fnorm = Ft.norm();
          lambda = std::max(lambda / 4.0, 1e-14 * JtJ.trace());
          break;
        }
        lambda *= 4.0;
      }
      if (fnorm < converged) done = true;
      else if (!improved) stalled = true;
    }
    if (!done && fnorm < genuine && stalled) done = true;  // at floating-point floor
    if (!done) {
      if (stalled) out.rejected.emplace_back(bz.reduce(r), fnorm);
      else out.unresolved.push_back(bz.reduce(r));
      continue;
    }
    const BlochPoint p = bz.reduce(r);
    bool duplicate = false;
    for (const auto& q : out.points)
      if (bz.torus_distance(p, q.position) < opt.merge_tolerance) {
        duplicate = true;
        break;
      }
    if (duplicate) continue;
    DiracPoint dp;
    dp.position = p;
    const HVector h = model.h_vector(p, opt.order);
    dp.in_plane_residual = h.in_plane_norm();
    dp.gap = 2.0 * std::abs(h.z);
    dp.hz_sign = dp.gap < opt.gap_tolerance * omega ? 0 : detail::sign_of(h.z);
    try {
      dp.chirality = chirality(model, p, opt.order);
    } catch (const NumericalError&) {
      out.unresolved.push_back(p);
      continue;
    }
    out.points.push_back(dp);
  }
  // Deterministic order: by fractional coordinates.
  std::sort(out.points.begin(), out.points.end(), [&](const DiracPoint& a, const DiracPoint& b) {
    const Vec2 fa = bz.fractional(a.position), fb = bz.fractional(b.position);
    if (std::abs(fa.x() - fb.x()) > 1e-9) return fa.x() < fb.x();
    return fa.y() < fb.y();
  });
  return out;
}

inline DiracSearch find_dirac_points(const LatticeConfig& cfg, const DiracOptions& opt = {}) {
  return find_dirac_points(FloquetModel(cfg), opt);
}

/// C = ½ Σ_DP sgn(h_z) χ.
inline ChernResult chern_dp_counting(const FloquetModel& model, const DiracOptions& opt = {}) {
  const DiracSearch s = find_dirac_points(model, opt);
  ChernResult r;
  r.method = ChernMethod::dp_counting;
  int twice = 0;
  double min_gap = std::numeric_limits<double>::infinity();
  for (const auto& dp : s.points) {
    twice += dp.hz_sign * dp.chirality;
    min_gap = std::min(min_gap, dp.gap);
  }
  r.min_gap = s.points.empty() ? 0.0 : min_gap;
  r.value = twice / 2;
  r.reliable = !s.points.empty() && r.min_gap >= opt.gap_tolerance * model.config().omega &&
               s.unresolved.empty() && twice % 2 == 0;
  if (s.points.empty()) r.note = "no Dirac points found";
  else if (!s.unresolved.empty()) r.note = "unresolved Dirac-point candidates";
  else if (!r.reliable) r.note = "gapless Dirac point";
  return r;
}

inline ChernResult chern_dp_counting(const LatticeConfig& cfg, const DiracOptions& opt = {}) {
  return chern_dp_counting(FloquetModel(cfg), opt);
}

/// sgn{ sin[(φ1-φ2)/2] sin[(φ2-φ3)/2] sin[(φ3-φ1)/2] }, 0 on phase boundaries.
inline int chern_small_f(const PhaseTriple& phi) {
  const double p = std::sin(0.5 * (phi[0] - phi[1])) * std::sin(0.5 * (phi[1] - phi[2])) *
                   std::sin(0.5 * (phi[2] - phi[0]));
  return detail::sign_of(p, 1e-12);
}

inline int default_bessel_terms(double f) { return static_cast<int>(std::ceil(f)) + 6; }

/// Truncated Σ_{n=1}^{n_terms} Σ_j J_n²(f) sin[n(φ_{j+1} - φ_j)] / n with
/// φ_4 ≡ φ_1.
inline double bessel_chern_sum(const PhaseTriple& phi, double f, int n_terms) {
  if (n_terms < 1) throw ParameterError("chern_bessel: n_terms must be >= 1");
  double sum = 0.0;
  for (int n = 1; n <= n_terms; ++n) {
    const double jn = bessel_j(n, f);
    double s = 0.0;
    for (int j = 0; j < 3; ++j) s += std::sin(n * (phi[(j + 1) % 3] - phi[j]));
    sum += jn * jn * s / n;
  }
  return sum;
}

inline int chern_bessel(const PhaseTriple& phi, double f, int n_terms) {
  return detail::sign_of(bessel_chern_sum(phi, f, n_terms), 1e-10);
}

inline int chern_bessel(const PhaseTriple& phi, double f) {
  return chern_bessel(phi, f, default_bessel_terms(f));
}

/// Lower-band Chern number from the plaquette (Fukui-Hatsugai-Suzuki) sum
/// over a grid x grid mesh of the zone, in the periodic gauge.
///
/// For a right-handed (R1, R2) the sum of principal-branch plaquette phases
/// is 2π times the degree (1/4π)∫ ĥ.(∂_x ĥ × ∂_y ĥ), which is the same
/// integer as ½ Σ sgn(h_z) χ.
inline ChernResult chern_fhs(const FloquetModel& model, int grid, const FhsOptions& opt = {}) {
  if (grid < 12) throw ParameterError("chern_fhs: grid must be >= 12");
  const auto& bz = model.zone();
  const int G = grid;
  const int dim = opt.source == BandSource::effective ? 2 : 2 * (2 * model.harmonics() + 1);
  std::vector<Eigen::VectorXcd> u(static_cast<std::size_t>(G) * G);
  double min_split = std::numeric_limits<double>::infinity();
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) {
      const BlochPoint r = bz.point(double(i) / G, double(j) / G);
      Eigen::VectorXcd v(dim);
      if (opt.source == BandSource::effective) {
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(
            model.effective_hamiltonian(r, opt.order, true));
        min_split = std::min(min_split, es.eigenvalues()(1) - es.eigenvalues()(0));
        v = es.eigenvectors().col(0);
      } else {
        const QuasiBands qb = model.quasienergy_bands(r, true);
        min_split = std::min(min_split, qb.energy[1] - qb.energy[0]);
        v = qb.vector[0];
      }
      u[static_cast<std::size_t>(i) * G + j] = std::move(v);
    }
  auto link = [&](int i0, int j0, int i1, int j1) {
    const auto& a = u[static_cast<std::size_t>((i0 % G + G) % G) * G + (j0 % G + G) % G];
    const auto& b = u[static_cast<std::size_t>((i1 % G + G) % G) * G + (j1 % G + G) % G];
    const cplx z = a.dot(b);  // conjugates a
    const double n = std::abs(z);
    return n > 0.0 ? z / n : cplx(1.0, 0.0);
  };
  double flux = 0.0;
  for (int i = 0; i < G; ++i)
    for (int j = 0; j < G; ++j) {
      const cplx loop = link(i, j, i + 1, j) * link(i + 1, j, i + 1, j + 1) *
                        link(i + 1, j + 1, i, j + 1) * link(i, j + 1, i, j);
      flux += std::arg(loop);
    }
  const double handed = bz.oriented_area() > 0 ? 1.0 : -1.0;
  const double raw = handed * flux / kTwoPi;

  ChernResult r;
  r.method = ChernMethod::fhs_wilson;
  r.value = static_cast<int>(std::lround(raw));
  r.residual = std::abs(raw - r.value);
  r.min_gap = min_split;
  r.reliable = min_split > opt.gap_tolerance * model.config().omega;
  if (!r.reliable) r.note = "gap closes on the grid";
  if (r.reliable && r.residual > 1e-3)
    throw NumericalError("chern_fhs: grid too coarse (residual " + std::to_string(r.residual) + ")");
  return r;
}

inline ChernResult chern_fhs(const LatticeConfig& cfg, int grid, const FhsOptions& opt = {}) {
  return chern_fhs(FloquetModel(cfg), grid, opt);
}

/// Energies and sublattice polarization <σ_z> of both H_eff bands along a path.
inline std::vector<PolarizationSample> band_polarization(const FloquetModel& model,
                                                         const std::vector<BlochPoint>& path,
                                                         Expansion order = Expansion::third) {
  std::vector<PolarizationSample> out;
  out.reserve(path.size());
  for (const auto& r : path) {
    const HVector h = model.h_vector(r, order);
    const double n = h.norm();
    PolarizationSample s;
    s.position = r;
    s.energy = {h.identity - n, h.identity + n};
    const double sz = n > 0.0 ? h.z / n : 0.0;
    s.sigma_z = {-sz, sz};
    out.push_back(s);
  }
  return out;
}

inline std::vector<PolarizationSample> band_polarization(const LatticeConfig& cfg,
                                                         const std::vector<BlochPoint>& path) {
  return band_polarization(FloquetModel(cfg), path);
}

/// Minimum of 2|h| over a grid x grid mesh, refined by pattern search.
inline GapResult min_bandgap(const FloquetModel& model, int grid,
                             Expansion order = Expansion::third) {
  if (grid < 24) throw ParameterError("min_bandgap: grid must be >= 24");
  const auto& bz = model.zone();
  auto gap_at = [&](double s1, double s2) {
    return 2.0 * model.h_vector(bz.point(s1, s2), order).norm();
  };
  double best = std::numeric_limits<double>::infinity();
  Vec2 s(0.0, 0.0);
  for (int i = 0; i < grid; ++i)
    for (int j = 0; j < grid; ++j) {
      const double g = gap_at(double(i) / grid, double(j) / grid);
      if (g < best) {
        best = g;
        s = Vec2(double(i) / grid, double(j) / grid);
      }
    }
  double step = 1.0 / grid;
  while (step > 1e-10) {
    bool moved = false;
    for (int di = -1; di <= 1; ++di)
      for (int dj = -1; dj <= 1; ++dj) {
        if (!di && !dj) continue;
        const Vec2 t = s + step * Vec2(di, dj);
        const double g = gap_at(t.x(), t.y());
        if (g < best) {
          best = g;
          s = t;
          moved = true;
        }
      }
    if (!moved) step *= 0.5;
  }
  return {best, bz.reduce(bz.point(s.x(), s.y()))};
}

inline GapResult min_bandgap(const LatticeConfig& cfg, int grid) {
  return min_bandgap(FloquetModel(cfg), grid);
}

}  // namespace slattice

#endif
