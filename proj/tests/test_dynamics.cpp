#include <gtest/gtest.h>

#include <cmath>

#include "nlsw/experiments.hpp"

using namespace nlsw;

namespace {

Model poly(std::vector<double> a) {
  ModelSpec s;
  s.kind = Kind::polynomial;
  s.r0 = 1.0;
  s.coeffs = std::move(a);
  return Model(s);
}

Model gp() {
  ModelSpec s;
  s.r0 = 1.0;
  return Model(s);
}

WaveProfile wave(const Model& m, double c, double h, double L) {
  ProfileOptions o;
  o.h = h;
  o.L = L;
  return solve_profile(m, c, o);
}

}  // namespace

TEST(Dynamics, RngIsDeterministicPerStream) {
  CounterRng a(7, 3), b(7, 3), c(7, 4);
  bool differ = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a.next();
    EXPECT_EQ(x, b.next());
    differ = differ || x != c.next();
  }
  EXPECT_TRUE(differ);
  CounterRng u(1);
  double mean = 0;
  for (int i = 0; i < 20000; ++i) mean += u.uniform() / 20000;
  EXPECT_NEAR(mean, 0.5, 0.01);
}

TEST(Dynamics, PerturbationSupportAndAmplitude) {
  const auto g = grid_from_h(0.1, 50);
  CounterRng r(11);
  const auto p = random_perturbation(g, r, 0.03, 0.5);
  double mx = 0;
  for (int i = 0; i < g.N; ++i) {
    mx = std::fmax(mx, std::abs(p[i]));
    if (std::fabs(g.x(i)) >= 25) EXPECT_EQ(p[i], cplx(0.0));
  }
  EXPECT_NEAR(mx, 0.03, 1e-15);
}

TEST(Dynamics, ExactWaveIsStationaryInItsFrame) {
  const Model m = gp();
  const auto P = wave(m, 1.0, 0.05, 125);
  EvolveOptions o;
  o.T = 20;
  o.dt = 0.01;
  o.out_dt = 1.0;
  o.distances = true;
  const auto R = evolve(m, P, {P.sample_complex(), 0.0, 1.0}, o);
  double sup = 0;
  for (const auto& s : R.samples) sup = std::fmax(sup, s.d_hy);
  EXPECT_LE(sup, 1e-5);
  EXPECT_TRUE(R.warnings.empty());
}

TEST(Dynamics, TimeReversal) {
  const Model m = gp();
  const auto P = wave(m, 0.6, 0.05, 40);
  auto psi = P.sample_complex();
  CounterRng r(5);
  const auto p = random_perturbation(P.grid, r, 0.02);
  for (int i = 0; i < P.grid.N; ++i) psi[i] += p[i];
  EvolveOptions o;
  o.T = 5;
  o.dt = 0.01;
  o.out_dt = 5;
  const auto F = evolve(m, P, {psi, 0.0, 0.6}, o);
  o.dt = -0.01;
  const auto B = evolve(m, P, F.final, o);
  double e = 0;
  for (int i = 0; i < P.grid.N; ++i) e = std::fmax(e, std::abs(B.final.psi[i] - psi[i]));
  EXPECT_LE(e, 1e-8);
  EXPECT_NEAR(B.final.t, 0.0, 1e-12);
}

TEST(Dynamics, ConservationOnPerturbedStableWave) {
  const Model m = gp();
  const auto P = wave(m, 1.0, 0.1, 640);
  auto psi = P.sample_complex();
  CounterRng r(2024);
  const auto p = random_perturbation(P.grid, r, 0.01, 0.05);
  for (int i = 0; i < P.grid.N; ++i) psi[i] += p[i];
  EvolveOptions o;
  o.T = 50;
  o.dt = 0.02;
  o.out_dt = 1.0;
  const auto R = evolve(m, P, {psi, 0.0, 1.0}, o);
  EXPECT_TRUE(R.radiation_guard);
  const auto& s0 = R.samples.front();
  double dE = 0, dP = 0, dH = 0;
  for (const auto& s : R.samples) {
    dE = std::fmax(dE, std::fabs(s.E - s0.E));
    dH = std::fmax(dH, std::fabs(s.H - s0.H));
    dP = std::fmax(dP, std::fabs(reduce_momentum(s.Pu - s0.Pu, 1.0)));
  }
  EXPECT_LE(dE / std::fabs(s0.E), 1e-6);
  EXPECT_LE(dP / std::fabs(s0.Pu), 1e-6);
  EXPECT_LE(dH / std::fabs(s0.H), 1e-10);
}

TEST(Dynamics, AccuracyGuardWarns) {
  const Model m = gp();
  const auto P = wave(m, 1.0, 0.05, 20);
  EvolveOptions o;
  o.T = 0.5;
  o.dt = 0.1;
  o.out_dt = 0.5;
  const auto R = evolve(m, P, {P.sample_complex(), 0.0, 1.0}, o);
  EXPECT_FALSE(R.warnings.empty());
}

TEST(Dynamics, GrowthRateOfExactExponential) {
  std::vector<double> t, a;
  for (int i = 0; i <= 200; ++i) {
    t.push_back(0.1 * i);
    a.push_back(1e-6 * std::exp(0.3 * t.back()));
  }
  const auto f = growth_rate(t, a);
  EXPECT_NEAR(f.gamma, 0.3, 1e-6);
}

TEST(Dynamics, StableRunRejectedByFit) {
  const Model m = gp();
  const auto P = wave(m, 1.0, 0.05, 40);
  CounterRng r(9);
  auto w = random_perturbation(P.grid, r, 1.0, 0.3);
  const double n = l2(w, P.grid.h);
  for (auto& z : w) z /= n;
  auto psi = P.sample_complex();
  for (int i = 0; i < P.grid.N; ++i) psi[i] += 1e-3 * w[i];
  EvolveOptions o;
  o.T = 20;
  o.dt = 0.02;
  o.out_dt = 0.2;
  o.mode = w;
  o.delta = 1e-3;
  const auto R = evolve(m, P, {psi, 0.0, 1.0}, o);
  try {
    growth_rate(R, 0.0, INFINITY, 1.0);
    FAIL() << "expected insufficient_growth";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "insufficient_growth");
  }
}

TEST(Dynamics, BubbleGrowthAndModeTracking) {
  const Model m = poly({-1, -3});
  const auto P = wave(m, 0.0, 0.05, 40);
  const auto s = seed_unstable_mode(m, P);
  const auto a = instability_run(m, P, s, 1e-3);
  EXPECT_NEAR(a.fit.gamma, a.gamma0, 0.1 * a.gamma0);
  const auto b = instability_run(m, P, s, 5e-4);
  EXPECT_GT(a.K, 0.0);
  const double q = b.K / a.K;
  EXPECT_GE(q, 0.5);
  EXPECT_LE(q, 2.0);
}
