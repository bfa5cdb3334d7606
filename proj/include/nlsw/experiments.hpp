#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "nlsw/dynamics.hpp"

namespace nlsw {

// Unstable mode of the wave P, detected by a dense solve on a small box and
// refined on the (larger) grid of P, where the NLS field w is built.
struct ModeSeed {
  SpectrumReport report;  // small-box dense solve
  UnstableEigen mode;     // refined on the grid of P
  std::vector<cplx> w;    // unit grid L2 norm
};

inline ModeSeed seed_unstable_mode(const Model& m, const WaveProfile& P, int spec_N = 768,
                                   std::optional<double> spec_L = {}) {
  ProfileOptions so;
  so.N = spec_N;
  so.L = spec_L;
  const auto Ps = solve_profile(m, P.c, so);
  auto Os = build_operators(m, Ps);
  Os.d_order = 8;
  ModeSeed s;
  s.report = unstable_eigen(Os);
  if (!s.report.unstable) throw Error("stable", "no unstable eigenvalue at this speed");
  auto O = build_operators(m, P, 0);
  O.d_order = 8;
  s.mode = refine_eigen(O, s.report.unstable->gamma0);
  s.w = to_nls_mode(P, s.mode.zeta, s.mode.upsilon);
  return s;
}

struct InstabilityRun {
  double gamma0_dense = 0, gamma0 = 0;
  GrowthFit fit;
  double K = 0;      // mode-tracking constant
  double t_max = 0;  // ln(2 eps0 / delta) / gamma0
  double seconds = 0;
  RunResult run;
};

// Psi(0) = U + delta w in the frame of U, run to 1.3 t_max.
inline InstabilityRun instability_run(const Model& m, const WaveProfile& P, const ModeSeed& s, double delta,
                                      double dt = 0.01, double eps0 = 0.05) {
  InstabilityRun r;
  r.gamma0_dense = s.report.unstable->gamma0;
  r.gamma0 = s.mode.gamma0;
  r.t_max = std::log(2 * eps0 / delta) / r.gamma0;
  FieldState st{P.sample_complex(), 0.0, P.c};
  for (int i = 0; i < P.grid.N; ++i) st.psi[i] += delta * s.w[i];
  EvolveOptions o;
  o.T = 1.3 * r.t_max;
  o.dt = dt;
  o.out_dt = 0.05;
  o.mode = s.w;
  o.delta = delta;
  o.gamma = r.gamma0;
  r.run = evolve(m, P, st, o);
  r.fit = growth_rate(r.run, 0.0, INFINITY, m.r0());
  r.K = tracking_constant(r.run, delta, r.gamma0, r.t_max);
  return r;
}

// Monte-Carlo probe of K(psi) >= E(U0) around the kink sampled on g.
struct KinkProbe {
  double min_gap = INFINITY;  // min over draws of K(psi) - E(U0)
  double min_bound_gap = INFINITY;  // min of E(psi) - 4 int_{inf|psi|}^{r0} sqrt F
  int samples = 0;
};

inline KinkProbe kink_probe(const Model& m, const WaveProfile& kink, int samples, double amplitude, double M,
                            std::uint64_t seed) {
  const double E0 = kink_energy(m);
  const auto U = kink.sample_complex();
  KinkProbe k;
  for (int s = 0; s < samples; ++s) {
    CounterRng rng(seed, std::uint64_t(s));
    const double amp = amplitude * (0.1 + 0.9 * rng.uniform());
    auto p = random_perturbation(kink.grid, rng, amp);
    for (int i = 0; i < kink.grid.N; ++i) p[i] += U[i];
    k.min_gap = std::fmin(k.min_gap, functional_K(m, kink.grid, p, M) - E0);
    double mu = INFINITY;
    for (auto z : p) mu = std::fmin(mu, std::abs(z));
    k.min_bound_gap = std::fmin(k.min_bound_gap, energy_grid(m, kink.grid, p) - kink_lower_bound(m, mu));
    ++k.samples;
  }
  return k;
}

// Speed of the dark wave whose modulus has minimum mu (small mu, kink models).
inline double speed_for_min_modulus(const Model& m, double mu) {
  auto inf_mod = [&](double c) {
    const auto v = find_xi_c(m, c);
    if (!v.xi_c) throw Error("no_wave", "branch ends before the requested minimum modulus");
    return std::sqrt(std::fmax(m.r02() + *v.xi_c, 0.0));
  };
  double lo = 0, hi = 0.5 * m.cs();
  if (inf_mod(hi) < mu) throw Error("config", "minimum modulus too large for this branch");
  for (int it = 0; it < 200 && hi - lo > 1e-15 * m.cs(); ++it) {
    const double mid = 0.5 * (lo + hi);
    (inf_mod(mid) < mu ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// K(U_c) - E(U0) along travelling waves with inf |U_c| = mu, and the
// log-log slope of the gap in mu.
struct MuGap {
  std::vector<double> mu, c, gap;
  double exponent = NAN;
};

inline MuGap mu_gap_scaling(const Model& m, const std::vector<double>& mus, double M, double h = 0.05,
                            double L = 30) {
  MuGap g;
  const double E0 = kink_energy(m);
  for (double mu : mus) {
    const double c = speed_for_min_modulus(m, mu);
    ProfileOptions o;
    o.h = h;
    o.L = L;
    const auto P = solve_profile(m, c, o);
    g.mu.push_back(mu);
    g.c.push_back(c);
    g.gap.push_back(functional_K(m, P.grid, P.sample_complex(), M) - E0);
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const int n = int(mus.size());
  for (int i = 0; i < n; ++i) {
    if (!(g.gap[i] > 0)) return g;
    const double X = std::log(g.mu[i]), Y = std::log(g.gap[i]);
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
  }
  if (n >= 2) g.exponent = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return g;
}

// Raw d_hy / d_Z over random perturbations of U (equivalence of distances).
struct RatioProbe {
  double min_ratio = INFINITY, max_ratio = 0;
  int samples = 0;
};

inline RatioProbe distance_ratio_probe(const WaveProfile& P, int samples, double amplitude, std::uint64_t seed) {
  const auto U = P.sample_complex();
  RatioProbe r;
  for (int s = 0; s < samples; ++s) {
    CounterRng rng(seed, std::uint64_t(s));
    const double amp = amplitude * (0.1 + 0.9 * rng.uniform());
    auto p = random_perturbation(P.grid, rng, amp);
    for (int i = 0; i < P.grid.N; ++i) p[i] += U[i];
    const double q = distance_hy_raw(P.grid, p, U) / distance_Z_raw(P.grid, p, U);
    r.min_ratio = std::fmin(r.min_ratio, q);
    r.max_ratio = std::fmax(r.max_ratio, q);
    ++r.samples;
  }
  return r;
}

// min over random perturbations of L(psi) - L(U) at speed c
inline double liapounov_probe(const Model& m, const WaveProfile& P, int samples, double amplitude, double M,
                              std::uint64_t seed) {
  const auto U = P.sample_complex();
  const double Pref = momentum_field(m, P.grid, U);
  const double L0 = liapounov_L(m, P.grid, U, P.c, M, Pref);
  double mn = INFINITY;
  for (int s = 0; s < samples; ++s) {
    CounterRng rng(seed, std::uint64_t(s));
    const double amp = amplitude * (0.1 + 0.9 * rng.uniform());
    auto p = random_perturbation(P.grid, rng, amp);
    for (int i = 0; i < P.grid.N; ++i) p[i] += U[i];
    mn = std::fmin(mn, liapounov_L(m, P.grid, p, P.c, M, Pref) - L0);
  }
  return mn;
}

}  // namespace nlsw
