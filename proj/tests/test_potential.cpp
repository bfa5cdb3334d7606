#include <gtest/gtest.h>

#include <cmath>

#include "nlsw/potential.hpp"

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

}  // namespace

TEST(Potential, GrossPitaevskiiPolynomial) {
  const Model m = gp();
  for (double c : {0.0, 0.5, 1.0, 1.3}) {
    const Potential V(m, c);
    for (double x : {-0.9, -0.5, -0.1, 0.2, 1.5}) {
      const double ref = x * x * (c * c - 2 - 2 * x);
      EXPECT_NEAR(V.V(x), ref, 1e-13 * (1 + std::fabs(ref)));
      EXPECT_NEAR(V.Vp(x), 2 * x * (c * c - 2 - 2 * x) - 2 * x * x, 1e-12);
    }
    EXPECT_EQ(V.V(0.0), 0.0);
  }
  EXPECT_NEAR(Potential(m, 1.0).V(-0.5), 0.0, 1e-15);
}

TEST(Potential, QuinticSonicRoot) {
  const Model m = poly({-2, 3, -4, 5, -12});
  EXPECT_NEAR(Potential(m, 2.0).V(-0.5), 0.0, 1e-13);
}

TEST(Potential, FindXiC) {
  const Model m = gp();
  auto v = find_xi_c(m, 1.0);
  EXPECT_EQ(v.status, Existence::dark_with_xi);
  ASSERT_TRUE(v.xi_c);
  EXPECT_NEAR(*v.xi_c, -0.5, 1e-12);

  EXPECT_EQ(find_xi_c(m, 1.5).status, Existence::no_wave);

  v = find_xi_c(m, 0.0);
  EXPECT_EQ(v.status, Existence::kink);
  ASSERT_TRUE(v.xi_c);
  EXPECT_NEAR(*v.xi_c, -1.0, 1e-12);
}

// F(1 + xi) = xi^2 / 2 + xi^3 vanishes at xi = -1/2 > -r0^2: a non-vanishing stationary wave
TEST(Potential, BubbleOfCubicQuintic) {
  const auto v = find_xi_c(poly({-1, -3}), 0.0);
  EXPECT_EQ(v.status, Existence::dark_with_xi);
  ASSERT_TRUE(v.xi_c);
  EXPECT_NEAR(*v.xi_c, -0.5, 1e-12);
}

TEST(Potential, SmallSpeedExpansion) {
  const Model m = gp();
  EXPECT_LE(xi_c_expansion_check(m, 0.1), 1e-12);
  EXPECT_EQ(xi_c_expansion_check(m, 0.0), 0.0);

  const Model k = poly({-1, 0, -1});
  double prev = 0;
  for (double c : {0.05, 0.025, 0.0125}) {
    const double q = xi_c_expansion_check(k, c) / std::pow(c, 4);
    EXPECT_LT(q, 10.0) << c;
    if (prev > 0) EXPECT_NEAR(q, prev, 0.1 * prev) << c;
    prev = q;
  }
}
