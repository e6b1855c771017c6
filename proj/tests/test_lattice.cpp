#include <gtest/gtest.h>

#include <random>

#include "oracles.hpp"
#include "slattice/bessel.hpp"
#include "slattice/brillouin.hpp"
#include "slattice/hoppings.hpp"
#include "slattice/lattice.hpp"

using namespace slattice;

namespace {

LatticeConfig make(double omega, double f, PhaseTriple phi = {0.0, 2 * kPi / 3, 4 * kPi / 3}) {
  LatticeConfig c;
  c.omega = omega;
  c.f = f;
  c.phi = phi;
  return c;
}

BlochPoint corner_k() { return BrillouinZone(Geometry::make_symmetric()).corner_k(); }
BlochPoint corner_kp() { return BrillouinZone(Geometry::make_symmetric()).corner_kp(); }

}  // namespace

// --- bessel ------------------------------------------------------------------

TEST(Bessel, TrivialValues) {
  EXPECT_DOUBLE_EQ(bessel_j(0, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(bessel_j(1, 0.0), 0.0);
  EXPECT_DOUBLE_EQ(bessel_j(5, 0.0), 0.0);
}

TEST(Bessel, FirstZeroOfJ0AgainstSeries) {
  EXPECT_NEAR(bessel_j(0, 2.40483), 0.0, 1e-4);
  EXPECT_NEAR(oracle::bessel_series(0, 2.40483), 0.0, 1e-4);
  EXPECT_NEAR(bessel_j(0, 2.40483), oracle::bessel_series(0, 2.40483), 1e-12);
}

TEST(Bessel, MatchesSeriesOnGrid) {
  for (int n = -12; n <= 12; ++n)
    for (double x = -15.0; x <= 15.0; x += 0.37)
      EXPECT_NEAR(bessel_j(n, x), oracle::bessel_series(n, x), 1e-10) << "n=" << n << " x=" << x;
}

TEST(Bessel, NegativeOrderParity) {
  for (int n = 0; n <= 10; ++n)
    EXPECT_NEAR(bessel_j(-n, 3.7), (n % 2 ? -1.0 : 1.0) * bessel_j(n, 3.7), 1e-15);
}

TEST(Bessel, RangeErrors) {
  EXPECT_THROW(bessel_j(65, 1.0), ParameterError);
  EXPECT_THROW(bessel_j(-65, 1.0), ParameterError);
  EXPECT_THROW(bessel_j(0, 100.5), ParameterError);
  EXPECT_NO_THROW(bessel_j(64, 100.0));
}

// --- config ------------------------------------------------------------------

TEST(Config, Validation) {
  LatticeConfig c;
  EXPECT_NO_THROW(c.validate());
  c.omega = 0.0;
  EXPECT_THROW(c.validate(), ParameterError);
  EXPECT_NO_THROW(c.validate(true));
  c = LatticeConfig{};
  c.delta = -1.0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = LatticeConfig{};
  c.f = -0.1;
  EXPECT_THROW(c.validate(), ParameterError);
  c = LatticeConfig{};
  c.gamma_b = -1.0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = LatticeConfig{};
  c.n_shells = 0;
  EXPECT_THROW(c.validate(), ParameterError);
  c = LatticeConfig{};
  c.geometry = Geometry::make_custom(Vec2(1, 0), Vec2(1, 0), Vec2(-1, 0));
  EXPECT_THROW(c.validate(), ParameterError);
}

TEST(Config, AutoHarmonics) {
  LatticeConfig c;
  c.f = 1.0;
  EXPECT_EQ(c.harmonics(), 8);
  c.f = 3.2;
  EXPECT_EQ(c.harmonics(), 10);
  c.n_max = 3;
  EXPECT_EQ(c.harmonics(), 3);
}

TEST(Config, PhaseWrapping) {
  LatticeConfig c;
  c.phi = {-kPi / 2, 2 * kPi, 7 * kPi};
  const auto n = c.normalized();
  EXPECT_NEAR(n.phi[0], 1.5 * kPi, 1e-12);
  EXPECT_NEAR(n.phi[1], 0.0, 1e-12);
  EXPECT_NEAR(n.phi[2], kPi, 1e-12);
  for (double p : n.phi) {
    EXPECT_GE(p, 0.0);
    EXPECT_LT(p, kTwoPi);
  }
}

TEST(Config, SymmetricGeometry) {
  const auto g = Geometry::make_symmetric();
  EXPECT_NEAR((g.k[0] + g.k[1] + g.k[2]).norm(), 0.0, 1e-15);
  for (int i = 0; i < 3; ++i) {
    EXPECT_NEAR(g.k[i].norm(), 1.0, 1e-15);
    EXPECT_NEAR(g.k[i].dot(g.k[(i + 1) % 3]), -0.5, 1e-15);
  }
}

// --- brillouin -----------------------------------------------------------------

TEST(Brillouin, DualBasis) {
  const BrillouinZone bz(Geometry::make_symmetric());
  EXPECT_NEAR(bz.b1().dot(bz.r1()), kTwoPi, 1e-12);
  EXPECT_NEAR(bz.b2().dot(bz.r2()), kTwoPi, 1e-12);
  EXPECT_NEAR(bz.b1().dot(bz.r2()), 0.0, 1e-12);
  EXPECT_NEAR(bz.b2().dot(bz.r1()), 0.0, 1e-12);
  EXPECT_NEAR((bz.corner_k() - oracle::cell_point(1.0 / 3, 2.0 / 3)).norm(), 0.0, 1e-12);
}

TEST(Brillouin, ReduceAndTorusDistance) {
  const BrillouinZone bz(Geometry::make_symmetric());
  const BlochPoint p = bz.point(0.2, 0.7);
  const BlochPoint q = p + 3 * bz.r1() - 2 * bz.r2();
  EXPECT_NEAR((bz.reduce(q) - p).norm(), 0.0, 1e-12);
  EXPECT_NEAR(bz.torus_distance(p, q), 0.0, 1e-12);
  EXPECT_NEAR((bz.named("Kp") - bz.corner_kp()).norm(), 0.0, 0.0);
  EXPECT_THROW(bz.named("X"), ParameterError);
}

// --- coupling field and Fourier blocks -------------------------------------------

TEST(Lattice, CouplingFieldExamples) {
  EXPECT_NEAR(std::abs(coupling_field(make(10, 0), corner_k(), 0.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(coupling_field(make(10, 0), BlochPoint::Zero(), 0.3) - cplx(30.0)), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(coupling_field(make(10, 1.0, {0, 0, 0}), BlochPoint::Zero(), 0.0) - cplx(30.0)), 0.0, 1e-12);
}

TEST(Lattice, CouplingFieldIsJacobiAngerSum) {
  auto cfg = make(7.0, 1.7, {0.3, 1.1, 4.0});
  cfg.n_max = 25;
  const BlochPoint r(0.4, -0.9);
  // sum far beyond the Floquet cutoff so only the Bessel tail J_n(1.7), n > 25, is dropped
  for (double t : {0.0, 0.013, 0.05}) {
    cplx sum = 0.0;
    for (int n = -25; n <= 25; ++n) sum += fourier_block(cfg, r, n)(1, 0) * std::exp(cplx(0.0, n * cfg.delta * t));
    EXPECT_NEAR(std::abs(sum - coupling_field(cfg, r, t)), 0.0, 1e-8);
  }
}

TEST(Lattice, FourierBlockExamples) {
  const auto b0 = fourier_block(make(10, 0), BlochPoint::Zero(), 0);
  EXPECT_NEAR(std::abs(b0(1, 0) - 30.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(b0(0, 1) - 30.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(b0(0, 0)) + std::abs(b0(1, 1)), 0.0, 0.0);
  EXPECT_NEAR(fourier_block(make(10, 0), BlochPoint(0.3, 0.2), 1).norm(), 0.0, 1e-15);
}

TEST(Lattice, FourierBlockMatchesPhasorOracle) {
  const PhaseTriple phi{0, 2 * kPi / 3, 4 * kPi / 3};
  const auto cfg = make(10, 1.0, phi);
  for (int n = -3; n <= 3; ++n)
    for (const BlochPoint& r : {corner_k(), corner_kp(), BlochPoint(0.37, -1.2)}) {
      const auto B = fourier_block(cfg, r, n);
      const cplx ref = oracle::phasor_block(10, 1.0, phi, n, r);
      const cplx ref_minus = oracle::phasor_block(10, 1.0, phi, -n, r);
      EXPECT_NEAR(std::abs(B(1, 0) - ref), 0.0, 1e-12);
      EXPECT_NEAR(std::abs(B(0, 1) - std::conj(ref_minus)), 0.0, 1e-12);
    }
  // Spec example: |<b|H_1|a>| at K is Ω J1(1) |Σ_j exp(i(φ_j + k_j.K))|.
  const auto k = oracle::wavevectors();
  const BlochPoint K = oracle::cell_point(1.0 / 3, 2.0 / 3);
  cplx s = 0.0;
  for (int j = 0; j < 3; ++j) s += std::exp(cplx(0.0, phi[j] + k[j].dot(K)));
  EXPECT_NEAR(std::abs(fourier_block(cfg, K, 1)(1, 0)), 10.0 * oracle::bessel_series(1, 1.0) * std::abs(s), 1e-12);
}

TEST(Lattice, FourierBlockTruncation) {
  auto cfg = make(10, 1.0);
  cfg.n_max = 3;
  EXPECT_NO_THROW(fourier_block(cfg, BlochPoint::Zero(), 3));
  EXPECT_THROW(fourier_block(cfg, BlochPoint::Zero(), 4), TruncationError);
  EXPECT_THROW(fourier_block(cfg, BlochPoint::Zero(), -4), TruncationError);
}

// --- Floquet matrix ----------------------------------------------------------------

TEST(Lattice, FloquetMatrixHermitian) {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 20; ++trial) {
    const auto cfg = make(1 + 30 * u(rng), 5 * u(rng), {kTwoPi * u(rng), kTwoPi * u(rng), kTwoPi * u(rng)});
    const BlochPoint r(8 * u(rng) - 4, 8 * u(rng) - 4);
    const auto H = build_floquet_matrix(cfg, r);
    EXPECT_EQ(H.rows(), 2 * (2 * cfg.harmonics() + 1));
    EXPECT_LT((H - H.adjoint()).cwiseAbs().maxCoeff(), 1e-12 * H.norm());
  }
}

TEST(Lattice, StaticLimitIsBlockDiagonal) {
  auto cfg = make(10, 0.0);
  cfg.n_max = 2;
  const BlochPoint r(0.3, 0.5);
  const auto H = build_floquet_matrix(cfg, r);
  const auto h0 = fourier_block(cfg, r, 0);
  for (int m = -2; m <= 2; ++m)
    for (int mp = -2; mp <= 2; ++mp) {
      const auto blk = H.block(2 * (m + 2), 2 * (mp + 2), 2, 2);
      if (m == mp)
        EXPECT_NEAR((blk - h0 - m * cfg.delta * Eigen::Matrix2cd::Identity()).norm(), 0.0, 1e-12);
      else
        EXPECT_NEAR(blk.norm(), 0.0, 0.0);
    }
}

TEST(Lattice, StaticQuasienergies) {
  const auto at_k = quasienergy_bands(make(10, 0.0), corner_k());
  EXPECT_NEAR(at_k.energy[0], 0.0, 1e-9);
  EXPECT_NEAR(at_k.energy[1], 0.0, 1e-9);
  const auto at_g = quasienergy_bands(make(10, 0.0), BlochPoint::Zero());
  // ±30 folded into (-40, 40] is unchanged
  EXPECT_NEAR(at_g.energy[0], -30.0, 1e-9);
  EXPECT_NEAR(at_g.energy[1], 30.0, 1e-9);
  EXPECT_NEAR(fold_quasienergy(50.0, 80.0), -30.0, 1e-12);
  EXPECT_NEAR(fold_quasienergy(40.0, 80.0), 40.0, 1e-12);
  EXPECT_NEAR(fold_quasienergy(-40.0, 80.0), 40.0, 1e-12);
}

TEST(Lattice, GaugeCovariance) {
  const PhaseTriple phi{0.2, 1.9, 4.4};
  const double shift = 1.234;
  for (const BlochPoint& r : {corner_k(), BlochPoint(0.3, -0.8)}) {
    const auto a = quasienergy_bands(make(12, 1.5, phi), r);
    const auto b = quasienergy_bands(make(12, 1.5, {phi[0] + shift, phi[1] + shift, phi[2] + shift}), r);
    EXPECT_NEAR(a.energy[0], b.energy[0], 1e-10);
    EXPECT_NEAR(a.energy[1], b.energy[1], 1e-10);
  }
}

TEST(Lattice, TranslationCovariance) {
  const auto cfg = make(12, 1.5, {0.2, 1.9, 4.4});
  const BrillouinZone bz(cfg.geometry);
  const BlochPoint r(0.3, -0.8);
  const auto a = quasienergy_bands(cfg, r);
  for (const BlochPoint& R : {bz.r1(), bz.r2(), BlochPoint(2 * bz.r1() - bz.r2())}) {
    const auto b = quasienergy_bands(cfg, r + R);
    EXPECT_NEAR(a.energy[0], b.energy[0], 1e-10);
    EXPECT_NEAR(a.energy[1], b.energy[1], 1e-10);
  }
}

TEST(Lattice, HarmonicConvergence) {
  // N ≥ f + 6 → N + 2 changes the central quasi-energies by < 1e-6 Ω
  for (double f : {1.0, 2.6, 4.0}) {
    const int N = static_cast<int>(std::ceil(f)) + 6;
    auto lo = make(25, f), hi = make(25, f);
    lo.n_max = N;
    hi.n_max = N + 2;
    for (const BlochPoint& r : {corner_k(), BlochPoint(0.4, 0.1)}) {
      const auto a = quasienergy_bands(lo, r), b = quasienergy_bands(hi, r);
      EXPECT_LT(std::abs(a.energy[0] - b.energy[0]), 1e-6 * 25) << "f=" << f;
      EXPECT_LT(std::abs(a.energy[1] - b.energy[1]), 1e-6 * 25) << "f=" << f;
    }
  }
}

TEST(Lattice, SmallCouplingTruncationOracle) {
  // n_max = 1 vs 2: the dropped second harmonic shifts the central bands by ~(3ΩJ_2(f))^2 / (2δ).
  // For shallow modulation that is below (Ω/δ)^3 Ω; in general it stays below (Ω/δ)^3 Ω + (3ΩJ_2)^2/δ.
  const BlochPoint pts[] = {corner_k(), BlochPoint(0.4, 0.1)};
  auto diff = [&](double omega, double f) {
    auto one = make(omega, f), two = make(omega, f);
    one.n_max = 1;
    two.n_max = 2;
    double worst = 0.0;
    for (const BlochPoint& r : pts) {
      const auto a = quasienergy_bands(one, r), b = quasienergy_bands(two, r);
      worst = std::max({worst, std::abs(a.energy[0] - b.energy[0]), std::abs(a.energy[1] - b.energy[1])});
    }
    return worst;
  };
  for (double omega : {2.0, 4.0, 8.0}) {
    const double cubic = std::pow(omega / 80.0, 3) * omega;
    EXPECT_LT(diff(omega, 0.25), cubic) << omega;
    for (double f : {0.5, 1.0, 2.0}) {
      const double leak = std::pow(3 * omega * oracle::bessel_series(2, f), 2) / 80.0;
      EXPECT_LT(diff(omega, f), cubic + leak) << omega << " " << f;
    }
  }
}

// --- effective h-vector --------------------------------------------------------------

TEST(Lattice, EffectiveHzVanishesInTrivialCases) {
  std::mt19937 rng(3);
  std::uniform_real_distribution<double> u(-4.0, 4.0);
  for (int i = 0; i < 20; ++i) {
    const BlochPoint r(u(rng), u(rng));
    EXPECT_NEAR(effective_h_vector(make(10, 0.0), r).z, 0.0, 1e-12);
    EXPECT_NEAR(effective_h_vector(make(10, 1.5, {0.7, 0.7, 0.7}), r).z, 0.0, 1e-12);
  }
}

TEST(Lattice, EffectiveGapMatchesExactAtK) {
  const auto cfg = make(10, 1.0);
  const auto h = effective_h_vector(cfg, corner_k());
  const auto q = quasienergy_bands(cfg, corner_k());
  const double exact = q.energy[1] - q.energy[0];
  EXPECT_GT(exact, 0.0);
  EXPECT_NEAR(2 * h.norm(), exact, 0.05 * exact);
}

TEST(Lattice, PerturbativeMismatchShrinksQuadratically) {
  // Ω/δ ∈ {1/8, 1/16, 1/32} at fixed f, φ, r
  const BlochPoint r(0.4, 0.1);
  std::vector<double> mismatch;
  for (double ratio : {1.0 / 8, 1.0 / 16, 1.0 / 32}) {
    auto cfg = make(80.0 * ratio, 1.0);
    const auto q = quasienergy_bands(cfg, r);
    const double exact = q.energy[1] - q.energy[0];
    mismatch.push_back(std::abs(2 * effective_h_vector(cfg, r).norm() - exact) / exact);
  }
  EXPECT_GE(mismatch[0] / mismatch[1], 4.0);
  EXPECT_GE(mismatch[1] / mismatch[2], 4.0);
}

TEST(Lattice, MirrorAntisymmetryOfHz) {
  // φ2 ↔ φ3 exchanges k2 and k3, i.e. reflects y → -y, which carries h_z along: h_z'(x, y) = h_z(x, -y).
  // Since h_z is odd under r → -r this is the same as h_z'(x, y) = -h_z(-x, y), the sign flip of the
  // mirror that fixes the k1 axis' normal.
  const auto a = make(25, 2.6, {0.0, 1.1, 3.9});
  const auto b = make(25, 2.6, {0.0, 3.9, 1.1});
  const FloquetModel ma(a), mb(b);
  for (int i = 0; i < 12; ++i)
    for (int j = 0; j < 12; ++j) {
      const BlochPoint r = ma.zone().point(i / 12.0, j / 12.0);
      const double hz = ma.h_vector(r).z;
      EXPECT_NEAR(hz, mb.h_vector(BlochPoint(r.x(), -r.y())).z, 1e-9);
      EXPECT_NEAR(hz, -mb.h_vector(BlochPoint(-r.x(), r.y())).z, 1e-9);
      EXPECT_NEAR(hz, -ma.h_vector(BlochPoint(-r.x(), -r.y())).z, 1e-9);
    }
}

TEST(Lattice, QuasiBandsSelectCentralReplica) {
  const auto q = quasienergy_bands(make(10, 1.0), BlochPoint(0.3, 0.2));
  EXPECT_FALSE(q.ambiguous);
  EXPECT_GT(q.central_weight[0], 0.5);
  EXPECT_GT(q.central_weight[1], 0.5);
  EXPECT_LE(q.energy[0], q.energy[1]);
}

// --- hoppings --------------------------------------------------------------------------

TEST(Hoppings, StaticLimit) {
  const auto t = effective_hoppings(make(10, 0.0));
  EXPECT_NEAR(t.t1, 10.0, 1e-9);
  EXPECT_NEAR(std::abs(t.t2), 0.0, 1e-9);
  EXPECT_NEAR(t.t3, 0.0, 1e-9);
  EXPECT_NEAR(t.t4, 0.0, 1e-9);
  EXPECT_NEAR(t.t1_correction, 0.0, 1e-9);
}

TEST(Hoppings, LeadingHoppingIsOmegaJ0) {
  EXPECT_LT(std::abs(effective_hoppings(make(10, 1.0)).t1 - 10 * oracle::bessel_series(0, 1.0)) / 10, 1e-3);
  EXPECT_LT(std::abs(effective_hoppings(make(25, 2.40483)).t1), 1e-2 * 25);
}

TEST(Hoppings, NnnIsPureImaginary) {
  for (double f : {1.0, 2.6}) {
    const auto t = effective_hoppings(make(25, f));
    ASSERT_GT(std::abs(t.t2), 1e-6);
    EXPECT_NEAR(std::abs(std::arg(t.t2)), kPi / 2, 1e-6) << "f=" << f;
    EXPECT_LT(t.max_imaginary, 1e-9);
  }
}

TEST(Hoppings, SatelliteRegimeHasLongRangeHops) {
  const auto t = effective_hoppings(make(25, 2.6));
  EXPECT_GT(std::abs(t.t3), 0.1);
  EXPECT_GT(std::abs(t.t4), 0.1);
  EXPECT_LT(std::abs(t.t1), std::abs(t.t2) * 5);  // comparable once J0 is small
}

TEST(Hoppings, CoarseGridRejected) { EXPECT_THROW(effective_hoppings(make(10, 1.0), 4), ParameterError); }
