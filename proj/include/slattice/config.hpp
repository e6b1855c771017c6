#ifndef SLATTICE_CONFIG_HPP
#define SLATTICE_CONFIG_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace slattice {

using cplx = std::complex<double>;
using Vec2 = Eigen::Vector2d;

/// Real-space position in the unit cell, which plays the role of the
/// quasi-momentum of the momentum-space lattice. |k_j| = 1 units.
using BlochPoint = Eigen::Vector2d;

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Error kinds. Everything derives from std::runtime_error or
// std::invalid_argument so callers can catch broadly.
struct ParameterError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};
struct TruncationError : std::out_of_range {
  using std::out_of_range::out_of_range;
};
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct ConfigurationError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

using PhaseTriple = std::array<double, 3>;

inline double wrap_phase(double phi) {
  double w = std::fmod(phi, kTwoPi);
  if (w < 0.0) w += kTwoPi;
  // fmod can land exactly on 2π after the shift for tiny negatives
  if (w >= kTwoPi) w = 0.0;
  return w;
}

inline PhaseTriple wrap_phases(const PhaseTriple& phi) {
  return {wrap_phase(phi[0]), wrap_phase(phi[1]), wrap_phase(phi[2])};
}

/// The three coupling wavevectors. The symmetric layout has k1 along -x and
/// mutual angles of 120 degrees, so k1 + k2 + k3 = 0.
struct Geometry {
  std::array<Vec2, 3> k;
  bool symmetric = true;

  static Geometry make_symmetric() {
    const double s = std::sqrt(3.0) / 2.0;
    return Geometry{{Vec2(-1.0, 0.0), Vec2(0.5, s), Vec2(0.5, -s)}, true};
  }

  static Geometry make_custom(const Vec2& k1, const Vec2& k2, const Vec2& k3) {
    return Geometry{{k1, k2, k3}, false};
  }
};

struct LatticeConfig {
  double omega = 10.0;    // coupling strength Ω (MHz)
  double f = 1.0;         // modulation depth
  double delta = 80.0;    // modulation frequency δ (MHz)
  PhaseTriple phi{0.0, 2.0 * kPi / 3.0, 4.0 * kPi / 3.0};
  Geometry geometry = Geometry::make_symmetric();
  double gamma_b = 6.0;   // excited-state decay (MHz)
  double gamma_a = 0.1;   // ground-coherence decay (MHz)
  int n_max = 0;          // 0 selects the automatic order
  int n_shells = 12;

  /// Floquet truncation order actually used: explicit n_max, or
  /// max(8, ceil(f) + 6) when n_max == 0.
  int harmonics() const {
    if (n_max > 0) return n_max;
    return std::max(8, static_cast<int>(std::ceil(f)) + 6);
  }

  /// Throws ParameterError on any violated invariant. The driven-lattice
  /// solver accepts Ω = 0 (an isolated probe site); everything else needs Ω > 0.
  void validate(bool allow_zero_coupling = false) const {
    auto finite = [](double x) { return std::isfinite(x); };
    if (!finite(omega) || omega < 0.0 || (omega == 0.0 && !allow_zero_coupling))
      throw ParameterError("omega must be > 0");
    if (!finite(delta) || delta <= 0.0) throw ParameterError("delta must be > 0");
    if (!finite(f) || f < 0.0) throw ParameterError("f must be >= 0");
    if (f > 100.0) throw ParameterError("f must be <= 100");
    if (!finite(gamma_b) || gamma_b < 0.0) throw ParameterError("gamma_b must be >= 0");
    if (!finite(gamma_a) || gamma_a < 0.0) throw ParameterError("gamma_a must be >= 0");
    if (n_max < 0) throw ParameterError("n_max must be >= 1 (or 0 for auto)");
    if (harmonics() > 32) throw ParameterError("n_max must be <= 32");
    if (n_shells < 1) throw ParameterError("n_shells must be >= 1");
    for (double p : phi)
      if (!finite(p)) throw ParameterError("phi must be finite");
    for (const auto& kv : geometry.k)
      if (!kv.allFinite() || kv.norm() == 0.0)
        throw ParameterError("coupling wavevectors must be finite and nonzero");
    const Vec2 b1 = geometry.k[0] - geometry.k[1];
    const Vec2 b2 = geometry.k[0] - geometry.k[2];
    if (std::abs(b1.x() * b2.y() - b1.y() * b2.x()) < 1e-9)
      throw ParameterError("k1-k2 and k1-k3 must be linearly independent");
  }

  /// Copy with phases reduced to [0, 2π).
  LatticeConfig normalized() const {
    LatticeConfig c = *this;
    c.phi = wrap_phases(phi);
    return c;
  }
};

}  // namespace slattice

#endif
