#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "nlsw/nonlinearity.hpp"
#include "nlsw/quadrature.hpp"

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

Model kappa(double k) { return poly({-1, 0, -k}); }

}  // namespace

TEST(Nonlinearity, GrossPitaevskiiSoundSpeed) {
  const Model m = gp();
  EXPECT_DOUBLE_EQ(m.r0(), 1.0);
  EXPECT_NEAR(m.cs(), std::numbers::sqrt2, 1e-14);
}

TEST(Nonlinearity, QuinticSoundSpeed) {
  const Model m = poly({-2, 3, -4, 5, -12});
  EXPECT_NEAR(m.cs(), 2.0, 1e-14);
}

TEST(Nonlinearity, FocusingRejected) {
  EXPECT_THROW(poly({1.0}), Error);
}

TEST(Nonlinearity, UnknownParameterRejected) {
  ModelSpec s;
  s.kind = Kind::saturated_exponential;
  s.r0 = 1.0;
  s.params = {{"rho0", 0.4}, {"bogus", 1.0}};
  EXPECT_THROW(Model{s}, Error);
}

TEST(Nonlinearity, PrimitiveAtZero) {
  EXPECT_NEAR(gp().F(0.0), 0.5, 1e-15);
  for (double k : {0.0, 1.0, 5.0, 20.0}) EXPECT_NEAR(kappa(k).F(0.0), 0.5 + k / 4, 1e-13) << k;
}

TEST(Nonlinearity, PrimitiveVanishesAtR0) {
  ModelSpec se;
  se.kind = Kind::saturated_exponential;
  se.r0 = 1.0;
  se.params = {{"rho0", 0.4}};
  ModelSpec sr;
  sr.kind = Kind::saturated_rational;
  sr.r0 = 1.0;
  sr.params = {{"rho0", 0.08}, {"nu", 2}};
  for (const Model& m : {gp(), poly({-1, 1.5, -1.5}), Model(se), Model(sr)}) EXPECT_EQ(m.F(m.r02()), 0.0);
}

// f, f' and F against closed forms and an independent quadrature
TEST(Nonlinearity, SaturatedClosedForms) {
  ModelSpec se;
  se.kind = Kind::saturated_exponential;
  se.r0 = 1.0;
  se.params = {{"rho0", 0.4}};
  const Model e(se);
  ModelSpec sr;
  sr.kind = Kind::saturated_rational;
  sr.r0 = 1.0;
  sr.params = {{"rho0", 0.08}, {"nu", 2}};
  const Model r(sr);
  auto fe = [](double p) { return std::exp((1 - p) / 0.4) - 1; };
  auto fr = [](double p) { return 0.04 * (1 / std::pow(1 + p / 0.08, 2) - 1 / std::pow(1 + 1 / 0.08, 2)); };
  for (double p : {0.0, 0.3, 0.9, 1.0, 1.7, 3.0}) {
    EXPECT_NEAR(e.f(p), fe(p), 1e-13 * (1 + std::fabs(fe(p))));
    EXPECT_NEAR(r.f(p), fr(p), 1e-13 * (1 + std::fabs(fr(p))));
    const double hd = 1e-5;
    EXPECT_NEAR(e.fp(p), (fe(p + hd) - fe(p - hd)) / (2 * hd), 1e-7 * (1 + std::fabs(e.fp(p))));
    EXPECT_NEAR(r.fp(p), (fr(p + hd) - fr(p - hd)) / (2 * hd), 1e-7);
    EXPECT_NEAR(e.F(p), integrate(fe, p, 1.0, 1e-15, 1e-13).value, 1e-11);
    EXPECT_NEAR(r.F(p), integrate(fr, p, 1.0, 1e-15, 1e-13).value, 1e-12);
  }
}

TEST(Nonlinearity, SonicIndexGrossPitaevskii) {
  const Model m = gp();
  ASSERT_TRUE(m.m_index());
  EXPECT_EQ(*m.m_index(), 0);
  EXPECT_NEAR(m.lambda_m(), -2.0, 1e-12);
}

TEST(Nonlinearity, SonicIndexQuintic) {
  const Model m = poly({-2, 3, -4, 5, -12});
  ASSERT_TRUE(m.m_index());
  EXPECT_EQ(*m.m_index(), 3);
  EXPECT_NEAR(m.lambda_m(), -4.0, 1e-10);
}

// with a_1 = -1, V_cs = -(2 - 4 a_2 / 3) xi^3 + (4 a_2 / 3 + a_3) xi^4 + ...
TEST(Nonlinearity, SonicIndexTuned) {
  const Model m = poly({-1, 1.5, 1.0});
  ASSERT_TRUE(m.m_index());
  EXPECT_EQ(*m.m_index(), 1);
  EXPECT_NEAR(m.lambda_m(), 3.0, 1e-10);
}
