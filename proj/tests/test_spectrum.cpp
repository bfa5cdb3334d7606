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

LinearizedOperators gp_ops(int N) { return build_operators(gp(), 1.0, N); }

}  // namespace

TEST(Spectrum, GrossPitaevskiiCounts) {
  const auto O = gp_ops(1024);
  const auto n = count_negative(O);
  EXPECT_EQ(n.n_neg_Mdag, 1);
  EXPECT_LE(n.n_neg_L, 1);
  // the banded Schur count agrees with diagonalizing L
  EXPECT_EQ(count_negative(O, 1e-8, true).n_neg_L, n.n_neg_L);
}

TEST(Spectrum, GrossPitaevskiiNoUnstableEigenvalue) {
  const auto R = unstable_eigen(gp_ops(768));
  EXPECT_FALSE(R.unstable);
  EXPECT_LE(R.max_real, 1e-6);
  EXPECT_LE(R.symmetry_defect, 1e-8);
}

TEST(Spectrum, ContinuumEdgeConstantCoefficientLimit) {
  const auto O = gp_ops(1024);
  // Mdag -> -(1/(2 r0^2)) d^2 + (cs^2 - c^2) / (2 r0^2) at infinity
  EXPECT_NEAR(continuum_edge(O), 0.5, 0.03 * 0.5);
}

TEST(Spectrum, ContinuumEdgeNearOne) {
  EXPECT_NEAR(continuum_edge(gp_ops(1024)), 1.0, 0.03);
}

TEST(Spectrum, GridSizesAgree) {
  const auto a = gp_ops(1024), b = gp_ops(2048);
  const auto na = count_negative(a), nb = count_negative(b);
  EXPECT_EQ(na.n_neg_Mdag, nb.n_neg_Mdag);
  EXPECT_NEAR(na.lowest_Mdag, nb.lowest_Mdag, 0.01 * std::fabs(nb.lowest_Mdag));
  EXPECT_NEAR(continuum_edge(a), continuum_edge(b), 0.01 * continuum_edge(b));
}

TEST(Spectrum, TranslationZeroMode) {
  const auto O = gp_ops(1024);
  const int n = O.N();
  std::vector<double> v = O.deta, Mv(n, 0.0);
  double num = 0, den = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = std::max(0, i - O.band); j <= std::min(n - 1, i + O.band); ++j) Mv[i] += O.Mdag_entry(i, j) * v[j];
    num += Mv[i] * Mv[i];
    den += v[i] * v[i];
  }
  double norm = 0;
  for (int i = 0; i < n; ++i)
    for (int j = std::max(0, i - O.band); j <= std::min(n - 1, i + O.band); ++j) norm = std::fmax(norm, std::fabs(O.Mdag_entry(i, j)));
  EXPECT_LE(std::sqrt(num / den) / norm, 1e-6);
}

TEST(Spectrum, ConstantProfile) {
  const Model m = gp();
  const double c = 0.7;
  const auto g = grid_from_N(512, 40.0);
  const auto O = build_operators(m, constant_profile(m, c, g));
  const auto n = count_negative(O);
  EXPECT_EQ(n.n_neg_Mdag, 0);
  EXPECT_GE(n.lowest_Mdag, (2 - c * c) / 2 * (1 - 1e-9));
  // rows away from the ends: -(1/2) D2 + (cs^2 - c^2)/2
  const stencil::Second D2(g.h);
  const int i = 256;
  for (int j = i - O.band; j <= i + O.band; ++j) {
    const double ref = -0.5 * D2(i, j) + (i == j ? (2 - c * c) / 2 : 0.0);
    EXPECT_NEAR(O.Mdag_entry(i, j), ref, 1e-9 * (1 + std::fabs(ref))) << j - i;
  }
}

TEST(Spectrum, BubbleUnstable) {
  const Model m = poly({-1, -3});
  const auto O = build_operators(m, 0.0, 768);
  auto Od = O;
  Od.d_order = 8;
  const auto R = unstable_eigen(Od);
  ASSERT_TRUE(R.unstable);
  EXPECT_GT(R.unstable->gamma0, 0.0);
  EXPECT_LE(std::fabs(R.unstable->imag), 1e-8);
  int accepted = 0;
  for (const auto& c : R.candidates) accepted += c.accepted;
  EXPECT_EQ(accepted, 1);
}

TEST(Spectrum, CubicQuinticSepticOneUnstablePoint) {
  const Model m = poly({-1, 1.5, -1.5});
  const auto D = diagram(m, 0.02, 1.41, 70);
  const BranchPoint* up = nullptr;
  for (const auto& p : D.points)
    if (p.exists && p.dPdc > 0 && !up) up = &p;
  ASSERT_NE(up, nullptr) << "no point with dP/dc > 0 on the branch";
  auto O = build_operators(m, up->c, 768);
  O.d_order = 8;
  const auto R = unstable_eigen(O);
  ASSERT_TRUE(R.unstable);
  EXPECT_GT(R.unstable->gamma0, 0.0);
}

TEST(Spectrum, ZeroModeMapsToZero) {
  const auto P = solve_profile(gp(), 1.0);
  const std::vector<double> z(P.x.size(), 0.0);
  for (auto w : to_nls_mode(P, z, z)) EXPECT_EQ(w, cplx(0.0));
}

TEST(Spectrum, BubbleModeTransverseToProfile) {
  const Model m = poly({-1, -3});
  ProfileOptions o;
  o.h = 0.05;
  o.L = 40;
  const auto P = solve_profile(m, 0.0, o);
  const auto s = seed_unstable_mode(m, P);
  ASSERT_EQ(s.w.size(), P.x.size());
  std::vector<double> A(P.x.size());
  for (std::size_t i = 0; i < A.size(); ++i) A[i] = P.A[i];
  const auto dA = derivative(A, P.grid.h);
  cplx ip = 0;
  double na = 0, nw = 0;
  for (std::size_t i = 0; i < A.size(); ++i) {
    ip += dA[i] * s.w[i];
    na += dA[i] * dA[i];
    nw += std::norm(s.w[i]);
  }
  EXPECT_LT(std::abs(ip) / std::sqrt(na * nw), 0.9);
  EXPECT_NEAR(s.mode.gamma0, s.report.unstable->gamma0, 0.01 * s.mode.gamma0);
}

TEST(Spectrum, ModeWithNonzeroMeanRejected) {
  const auto P = solve_profile(gp(), 1.0);
  std::vector<double> z(P.x.size(), 0.0), u(P.x.size());
  for (std::size_t i = 0; i < u.size(); ++i) u[i] = std::exp(-P.x[i] * P.x[i]);
  try {
    to_nls_mode(P, z, u);
    FAIL() << "expected mode_mean";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "mode_mean");
  }
}
