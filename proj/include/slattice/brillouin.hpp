#ifndef SLATTICE_BRILLOUIN_HPP
#define SLATTICE_BRILLOUIN_HPP

#include <cmath>
#include <string>
#include <vector>

#include "slattice/config.hpp"

namespace slattice {

/// Real-space Brillouin zone of the momentum-space lattice. The momentum
/// lattice is generated by b1 = k1 - k2 and b2 = k1 - k3; the zone is the
/// torus spanned by R1, R2 with b_i . R_j = 2π δ_ij.
class BrillouinZone {
 public:
  explicit BrillouinZone(const Geometry& g) : k_(g.k) {
    b1_ = k_[0] - k_[1];
    b2_ = k_[0] - k_[2];
    Eigen::Matrix2d B;
    B.row(0) = b1_.transpose();
    B.row(1) = b2_.transpose();
    const Eigen::Matrix2d R = kTwoPi * B.inverse();  // columns R1, R2
    r1_ = R.col(0);
    r2_ = R.col(1);
  }

  const Vec2& b1() const { return b1_; }
  const Vec2& b2() const { return b2_; }
  const Vec2& r1() const { return r1_; }
  const Vec2& r2() const { return r2_; }
  const std::array<Vec2, 3>& k() const { return k_; }

  /// Signed area of the cell; negative when (R1, R2) is left-handed.
  double oriented_area() const { return r1_.x() * r2_.y() - r1_.y() * r2_.x(); }
  double area() const { return std::abs(oriented_area()); }
  double diameter() const { return std::max((r1_ + r2_).norm(), (r1_ - r2_).norm()); }

  BlochPoint point(double s1, double s2) const { return s1 * r1_ + s2 * r2_; }

  /// Fractional coordinates (s1, s2) with r = s1 R1 + s2 R2.
  Vec2 fractional(const BlochPoint& r) const {
    return Vec2(b1_.dot(r) / kTwoPi, b2_.dot(r) / kTwoPi);
  }

  /// Image of r in the fundamental domain s1, s2 in [0, 1).
  BlochPoint reduce(const BlochPoint& r) const {
    Vec2 s = fractional(r);
    s.x() -= std::floor(s.x());
    s.y() -= std::floor(s.y());
    if (s.x() >= 1.0) s.x() = 0.0;
    if (s.y() >= 1.0) s.y() = 0.0;
    return point(s.x(), s.y());
  }

  /// Distance between two points on the torus (minimum over images).
  double torus_distance(const BlochPoint& a, const BlochPoint& b) const {
    Vec2 ds = fractional(a - b);
    ds.x() -= std::round(ds.x());
    ds.y() -= std::round(ds.y());
    double best = point(ds.x(), ds.y()).norm();
    for (int i = -1; i <= 1; ++i)
      for (int j = -1; j <= 1; ++j)
        best = std::min(best, point(ds.x() + i, ds.y() + j).norm());
    return best;
  }

  // Corners where sum_j exp(i k_j . r) vanishes. These fractional
  // coordinates hold for any geometry, since the sum factors as
  // exp(i k1.r) (1 + exp(-2πi s1) + exp(-2πi s2)).
  BlochPoint corner_k() const { return point(1.0 / 3.0, 2.0 / 3.0); }
  BlochPoint corner_kp() const { return point(2.0 / 3.0, 1.0 / 3.0); }
  BlochPoint gamma() const { return BlochPoint::Zero(); }
  BlochPoint m_point() const { return point(0.5, 0.5); }

  /// Named high-symmetry point: "K", "Kp" (or "K'"), "G" (or "Gamma"), "M".
  BlochPoint named(const std::string& label) const {
    if (label == "K") return corner_k();
    if (label == "Kp" || label == "K'") return corner_kp();
    if (label == "G" || label == "Gamma" || label == "Γ") return gamma();
    if (label == "M") return m_point();
    throw ParameterError("unknown high-symmetry label: " + label);
  }

 private:
  std::array<Vec2, 3> k_;
  Vec2 b1_, b2_, r1_, r2_;
};

/// Piecewise-linear path through the given points, `points_per_segment`
/// samples per leg, endpoint of the last leg included.
inline std::vector<BlochPoint> linear_path(const std::vector<BlochPoint>& nodes,
                                           int points_per_segment) {
  if (nodes.size() < 2) throw ParameterError("path needs at least two nodes");
  if (points_per_segment < 1) throw ParameterError("points per segment must be >= 1");
  std::vector<BlochPoint> out;
  for (std::size_t s = 0; s + 1 < nodes.size(); ++s)
    for (int i = 0; i < points_per_segment; ++i) {
      const double t = static_cast<double>(i) / points_per_segment;
      out.push_back((1.0 - t) * nodes[s] + t * nodes[s + 1]);
    }
  out.push_back(nodes.back());
  return out;
}

}  // namespace slattice

#endif
