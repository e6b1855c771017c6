#include <gtest/gtest.h>

#include <set>

#include "oracles.hpp"
#include "slattice/dynamics.hpp"

using namespace slattice;

namespace {

LatticeConfig make(double omega, double f, PhaseTriple phi = {0.0, 2 * kPi / 3, 4 * kPi / 3}, int shells = 4) {
  LatticeConfig c;
  c.omega = omega;
  c.f = f;
  c.phi = phi;
  c.n_shells = shells;
  return c;
}

}  // namespace

TEST(SiteGraph, OneShell) {
  const auto g = build_site_graph(make(10, 1.0, {0, 2, 4}, 1));
  // origin, 3 a-neighbours, 6 further b-sites
  EXPECT_EQ(g.size(), 10u);
  EXPECT_EQ(g.edges.size(), 9u);
  EXPECT_EQ(g.sites[g.origin].sublattice, Sublattice::b);
  EXPECT_NE(g.k_plus, g.origin);
  EXPECT_NE(g.k_minus, g.origin);
}

TEST(SiteGraph, BipartiteAndSpecialSites) {
  const auto cfg = make(10, 1.0, {0, 2, 4}, 5);
  const auto g = build_site_graph(cfg);
  for (const auto& e : g.edges) {
    EXPECT_EQ(g.sites[e.b_site].sublattice, Sublattice::b);
    EXPECT_EQ(g.sites[e.a_site].sublattice, Sublattice::a);
    // a photon of field j adds k_j
    const Vec2 dk = g.sites[e.b_site].momentum - g.sites[e.a_site].momentum;
    EXPECT_NEAR((dk - cfg.geometry.k[e.field]).norm(), 0.0, 1e-12);
  }
  const auto& k = cfg.geometry.k;
  EXPECT_NEAR((g.sites[g.k_plus].momentum - (k[0] - k[1])).norm(), 0.0, 1e-12);
  EXPECT_NEAR((g.sites[g.k_minus].momentum - (k[0] - k[2])).norm(), 0.0, 1e-12);
}

TEST(SiteGraph, QuadraticGrowth) {
  std::vector<double> n;
  for (int s : {4, 8, 16}) n.push_back(static_cast<double>(build_site_graph(make(10, 1, {0, 2, 4}, s)).size()));
  EXPECT_NEAR(n[2] / n[1], 4.0, 0.3);
  EXPECT_NEAR(n[1] / n[0], 4.0, 0.6);
}

TEST(SteadyState, IsolatedSite) {
  auto cfg = make(0.0, 1.0);
  const double dp = 1.7;
  const auto r = steady_state(cfg, dp);
  const cplx expected = 1.0 / cplx(dp, 0.5 * cfg.gamma_b);
  const SteadyStateSolver solver(cfg);
  for (std::size_t s = 0; s < solver.graph().size(); ++s)
    for (int m = -r.harmonics; m <= r.harmonics; ++m) {
      const cplx c = r.amplitude(static_cast<int>(s), m);
      if (static_cast<int>(s) == solver.graph().origin && m == 0)
        EXPECT_NEAR(std::abs(c - expected), 0.0, 1e-14);
      else
        EXPECT_EQ(c, cplx(0.0));
    }
  EXPECT_FALSE(r.eta.has_value());
  EXPECT_THROW(superradiance_contrast(cfg, dp), NumericalError);
}

TEST(SteadyState, NeedsDecay) {
  auto cfg = make(10, 1.0);
  cfg.gamma_a = 0.0;
  cfg.gamma_b = 0.0;
  EXPECT_THROW(SteadyStateSolver{cfg}, ConfigurationError);
}

TEST(SteadyState, MatchesDenseStaticOracle) {
  auto cfg = make(10, 0.0, {0, 2, 4}, 3);
  cfg.n_max = 1;
  const auto g = oracle::static_graph(10.0, 2 * cfg.n_shells);
  const SteadyStateSolver solver(cfg);
  ASSERT_EQ(solver.graph().size(), static_cast<std::size_t>(g.H.rows()));
  for (double dp : {-35.0, -12.0, 0.0, 3.0, 29.0}) {
    const auto r = solver.solve(dp);
    const cplx ref = oracle::static_probe_amplitude(g, dp, cfg.gamma_b, cfg.gamma_a);
    EXPECT_NEAR(std::abs(r.amplitude(solver.graph().origin, 0) - ref), 0.0, 1e-10) << dp;
  }
}

TEST(SteadyState, HarmonicDecouplingAtZeroDepth) {
  const auto cfg = make(10, 0.0);
  const auto r = steady_state(cfg, 4.0);
  const SteadyStateSolver solver(cfg);
  double worst = 0.0;
  for (std::size_t s = 0; s < solver.graph().size(); ++s)
    for (int m = -r.harmonics; m <= r.harmonics; ++m)
      if (m != 0) worst = std::max(worst, std::abs(r.amplitude(static_cast<int>(s), m)));
  EXPECT_LT(worst, 1e-12);
}

TEST(SteadyState, ResidualAndRange) {
  const auto r = steady_state(make(10, 1.0), 0.0);
  EXPECT_LT(r.residual, 1e-9);
  ASSERT_TRUE(r.eta.has_value());
  EXPECT_LE(std::abs(*r.eta), 1.0);
}

TEST(SteadyState, Linearity) {
  const auto cfg = make(10, 1.0);
  const SteadyStateSolver solver(cfg);
  const auto base = solver.solve(2.0);
  const cplx lambda(0.3, -1.7);
  Eigen::VectorXcd drive = Eigen::VectorXcd::Zero(solver.dimension());
  drive(solver.index(solver.graph().origin, 0)) = lambda;
  const auto scaled = solver.solve(2.0, &drive);
  EXPECT_LT((scaled.amplitudes - lambda * base.amplitudes).norm(), 1e-10 * base.amplitudes.norm());
  EXPECT_NEAR(*scaled.eta, *base.eta, 1e-12);
  Eigen::VectorXcd wrong = Eigen::VectorXcd::Zero(3);
  EXPECT_THROW(solver.solve(0.0, &wrong), ParameterError);
}

TEST(SteadyState, MirrorSymmetricPhasesGiveZeroContrast) {
  for (double dp : {-5.0, 0.0, 7.0}) EXPECT_NEAR(superradiance_contrast(make(10, 1.0, {0.0, 1.3, 1.3}), dp), 0.0, 1e-9);
}

TEST(SteadyState, MirrorAntisymmetry) {
  for (auto phi : {PhaseTriple{0.0, 2 * kPi / 3, 4 * kPi / 3}, PhaseTriple{0.0, 0.7, 3.1}}) {
    const double a = superradiance_contrast(make(10, 1.0, phi), 0.0);
    const double b = superradiance_contrast(make(10, 1.0, {phi[0], phi[2], phi[1]}), 0.0);
    EXPECT_NEAR(a, -b, 1e-9);
  }
}

TEST(SteadyState, ContrastSignFollowsChern) {
  // reference point: C = +1 here, and sgn(η) = kEtaChernSign · sgn(C)
  const double eta = superradiance_contrast(make(10, 1.0, {0.0, 2 * kPi / 3, 4 * kPi / 3}, 12), 0.0);
  EXPECT_EQ(eta > 0 ? 1 : -1, kEtaChernSign);
  const double rev = superradiance_contrast(make(10, 1.0, {0.0, 4 * kPi / 3, 2 * kPi / 3}, 12), 0.0);
  EXPECT_LT(eta * rev, 0.0);
}

TEST(SteadyState, ShellConvergence) {
  // n_shells 12 → 16 changes η by < 1e-3 at the reference parameter points
  for (auto [omega, f] : {std::pair{10.0, 1.0}, std::pair{25.0, 3.2}}) {
    const double a = superradiance_contrast(make(omega, f, {0.0, 2 * kPi / 3, 4 * kPi / 3}, 12), 0.0);
    const double b = superradiance_contrast(make(omega, f, {0.0, 2 * kPi / 3, 4 * kPi / 3}, 16), 0.0);
    EXPECT_LT(std::abs(a - b), 1e-3) << "f=" << f;
  }
}

TEST(Absorption, PassiveAndFarDetunedDecay) {
  const auto cfg = make(10, 1.0);
  std::vector<double> grid;
  for (double d = -100; d <= 100; d += 5) grid.push_back(d);
  const auto a = absorption_spectrum(cfg, grid, 0.0, 2);
  for (double x : a) EXPECT_GE(x, 0.0);
  const double far = absorption_spectrum(cfg, {3 * 10 + cfg.harmonics() * cfg.delta + 400})[0];
  EXPECT_LT(far, 1e-3 * *std::max_element(a.begin(), a.end()));
}

TEST(Absorption, StaticSpectrumSupportAndEitDip) {
  auto cfg = make(10, 0.0, {0, 2, 4}, 6);
  cfg.n_max = 1;
  const auto g = oracle::static_graph(10.0, 2 * cfg.n_shells);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(g.H);
  EXPECT_GE(es.eigenvalues().minCoeff(), -30.0 - 1e-9);
  EXPECT_LE(es.eigenvalues().maxCoeff(), 30.0 + 1e-9);
  const auto a = absorption_spectrum(cfg, {0.0, -12.0, 12.0, -60.0, 60.0});
  EXPECT_LT(a[0], a[1]);  // EIT suppression at line centre
  EXPECT_LT(a[0], a[2]);
  EXPECT_LT(a[3], 0.1 * a[1]);  // outside [-3Ω, 3Ω]
  EXPECT_LT(a[4], 0.1 * a[2]);
  EXPECT_NEAR(a[1], a[2], 1e-9 * a[1]);  // symmetric static spectrum
}

TEST(Doppler, GaussHermiteIntegratesPolynomials) {
  const auto [x, w] = gauss_hermite(10);
  double m0 = 0, m2 = 0, m4 = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    m0 += w[i];
    m2 += w[i] * x[i] * x[i];
    m4 += w[i] * std::pow(x[i], 4);
  }
  EXPECT_NEAR(m0, std::sqrt(kPi), 1e-12);
  EXPECT_NEAR(m2, std::sqrt(kPi) / 2, 1e-12);
  EXPECT_NEAR(m4, 3 * std::sqrt(kPi) / 4, 1e-12);
}

TEST(Doppler, ZeroWidthIsPlainContrast) {
  const auto cfg = make(10, 1.0);
  EXPECT_DOUBLE_EQ(doppler_averaged_contrast(cfg, 0.0, 0.0), superradiance_contrast(cfg, 0.0));
  const double avg = doppler_averaged_contrast(cfg, 0.0, 0.5, 6);
  EXPECT_LE(std::abs(avg), 1.0);
  EXPECT_THROW(doppler_averaged_contrast(cfg, 0.0, -1.0), ParameterError);
}
