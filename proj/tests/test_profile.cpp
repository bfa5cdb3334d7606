#include <gtest/gtest.h>

#include <chrono>
#include <cmath>
#include <complex>

#include "nlsw/fields.hpp"
#include "nlsw/profile.hpp"

using namespace nlsw;

namespace {

Model gp() {
  ModelSpec s;
  s.r0 = 1.0;
  return Model(s);
}

// sup error against the explicit wave after the best global phase
// sqrt((2 - c^2)/2) tanh(x sqrt(2 - c^2)/2) + i c/sqrt2 solves U'' + U f = i c U';
// the conjugate sign belongs to the wave moving the other way
double gp_closed_form_error(const WaveProfile& P) {
  const double c = P.c, k = std::sqrt(2 - c * c);
  const auto U = P.sample_complex();
  std::vector<std::complex<double>> V(U.size());
  std::complex<double> ip = 0;
  for (std::size_t i = 0; i < U.size(); ++i) {
    V[i] = {k / std::sqrt(2.0) * std::tanh(P.x[i] * k / 2), c / std::sqrt(2.0)};
    ip += U[i] * std::conj(V[i]);
  }
  const auto ph = std::polar(1.0, std::arg(ip));
  double e = 0;
  for (std::size_t i = 0; i < U.size(); ++i) e = std::fmax(e, std::abs(U[i] - ph * V[i]));
  return e;
}

}  // namespace

TEST(Profile, GrossPitaevskiiClosedForm) {
  const Model m = gp();
  for (double c : {0.5, 1.0}) {
    const auto t0 = std::chrono::steady_clock::now();
    const auto P = solve_profile(m, c);
    const double sec = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    EXPECT_LE(gp_closed_form_error(P), 1e-6) << c;
    EXPECT_LT(sec, 1.0) << c;
  }
}

TEST(Profile, GrossPitaevskiiKink) {
  const auto P = solve_profile(gp(), 0.0);
  ASSERT_TRUE(P.kink());
  const auto U = P.sample_complex();
  const double s = U.back().real() > 0 ? 1.0 : -1.0;
  double e = 0;
  for (std::size_t i = 0; i < U.size(); ++i) e = std::fmax(e, std::abs(s * U[i] - std::tanh(P.x[i] / std::sqrt(2.0))));
  EXPECT_LE(e, 1e-6);
  EXPECT_LE(std::abs(value_at_zero(P.grid, U)), 1e-10);
}

TEST(Profile, TurningPointAtOrigin) {
  const Model m = gp();
  const auto P = solve_profile(m, 1.0);
  const double a = std::abs(value_at_zero(P.grid, P.sample_complex()));
  EXPECT_NEAR(a * a - 1, P.xi_c, 1e-10);
  EXPECT_NEAR(a, 1 / std::sqrt(2.0), 1e-10);
}

TEST(Profile, NoWaveAboveSoundSpeed) {
  try {
    solve_profile(gp(), 1.5);
    FAIL() << "expected no_wave";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), "no_wave");
  }
}

TEST(Profile, DecayRates) {
  const Model m = gp();
  for (double f : {0.3, 0.8, 1.2}) {
    const double c = f * m.cs() / std::sqrt(2.0);
    const auto d = decay_fit(solve_profile(m, c));
    EXPECT_FALSE(d.algebraic);
    EXPECT_NEAR(d.rate, std::sqrt(2 - c * c), 0.02 * std::sqrt(2 - c * c)) << c;
  }
  const auto k = decay_fit(solve_profile(m, 0.0));
  EXPECT_NEAR(k.rate, m.cs(), 0.02 * m.cs());
}

TEST(Profile, QuinticSonicAlgebraicDecay) {
  ModelSpec s;
  s.kind = Kind::polynomial;
  s.r0 = 1.0;
  s.coeffs = {-2, 3, -4, 5, -12};
  const Model m(s);
  ProfileOptions o;
  o.allow_infinite_energy = true;
  o.h = 0.1;
  o.L = 400;
  const auto P = solve_profile(m, 2.0, o);
  EXPECT_EQ(P.status, Existence::sonic);
  const auto d = decay_fit(P);
  EXPECT_TRUE(d.algebraic);
  EXPECT_NEAR(d.rate, -0.5, 0.025);
}

TEST(Profile, InfiniteEnergySonicNeedsOptIn) {
  ModelSpec s;
  s.kind = Kind::polynomial;
  s.r0 = 1.0;
  s.coeffs = {-2, 3, -4, 5, -12};
  EXPECT_THROW(solve_profile(Model(s), 2.0), Error);
}
