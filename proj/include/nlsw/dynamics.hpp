#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nlsw/distance.hpp"
#include "nlsw/linalg.hpp"

namespace nlsw {

// Counter-based 64-bit generator: output k is a SplitMix64 finalization of
// seed + k * golden, so draws are reproducible and independent of order.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0)
      : key_(mix(seed ^ mix(stream + 0x632be59bd9b4e019ULL))) {}
  std::uint64_t next() { return mix(key_ + 0x9e3779b97f4a7c15ULL * ++ctr_); }
  double uniform() { return (next() >> 11) * 0x1.0p-53; }  // [0, 1)
  double normal() {
    const double u = 1 - uniform(), v = uniform();
    return std::sqrt(-2 * std::log(u)) * std::cos(2 * std::numbers::pi * v);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }
  std::uint64_t key_;
  std::uint64_t ctr_ = 0;
};

// Smooth random complex perturbation, zero outside |x| <= support L, with sup
// norm amplitude. A few Gaussian bumps under a compactly supported window.
inline std::vector<cplx> random_perturbation(const Grid& g, CounterRng& rng, double amplitude,
                                             double support = 0.5, int bumps = 6) {
  const auto x = g.points();
  const double R = support * g.L;
  std::vector<cplx> p(x.size(), 0.0);
  for (int b = 0; b < bumps; ++b) {
    const double w = std::fmin(1 + 2 * rng.uniform(), 0.2 * R);
    const double x0 = (2 * rng.uniform() - 1) * std::fmax(R - 2 * w, 0.0);
    const cplx a(rng.normal(), rng.normal());
    for (std::size_t i = 0; i < x.size(); ++i) {
      const double s = (x[i] - x0) / w;
      p[i] += a * std::exp(-0.5 * s * s);
    }
  }
  double mx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double s = x[i] / R;
    p[i] *= std::fabs(s) < 1 ? std::exp(1 - 1 / (1 - s * s)) : 0.0;
    mx = std::fmax(mx, std::abs(p[i]));
  }
  if (mx > 0)
    for (auto& z : p) z *= amplitude / mx;
  return p;
}

struct FieldState {
  std::vector<cplx> psi;
  double t = 0;
  double c_frame = 0;
};

struct EvolveOptions {
  double T = 10;       // duration; the sign of dt sets the direction
  double dt = 0.01;
  double out_dt = 0.1;
  double clamp_frac = 0.02;
  double fp_tol = 1e-13;
  int fp_max = 60;
  double accuracy_guard = 20;  // warn when |dt| > guard h^2
  bool distances = false;      // orbital d_hy, d_Z against the reference each sample
  double y_range = 1.0;
  // mode tracking: a(t) = <Psi - U, w>; error |Psi - U - delta e^{gamma t} w|
  std::vector<cplx> mode;
  double delta = 0, gamma = 0;
  bool keep_snapshots = false;
};

struct Sample {
  double t = 0;
  double E = NAN;       // energy over rows with full stencils
  double H = NAN;       // discrete Hamiltonian conserved by the scheme
  double Pu = NAN;      // untwisted momentum
  double d_hy = NAN, d_Z = NAN;
  double amp = NAN;     // mode amplitude
  double track = NAN;   // mode tracking error
};

struct RunResult {
  std::vector<Sample> samples;
  FieldState final;
  std::vector<std::vector<cplx>> snapshots;
  int max_fp_iters = 0;
  double boundary_defect = 0;  // max | |Psi| - r0 | on the clamp
  bool radiation_guard = true;  // T (c_s + |c|) <= 0.4 L
  std::vector<std::string> warnings;
};

// Crank-Nicolson in the co-moving frame,
//   i psi_t = H psi - f_mid psi,  H = i c D - D2,
// with f_mid the mean of f over [|psi0|^2, |psi1|^2] (4-point Gauss-Legendre)
// so that <H psi, psi> + h sum F(|psi|^2) is conserved exactly. Points in
// the outer clamp_frac of the box stay at their initial values.
class Stepper {
 public:
  Stepper(const Model& m, const Grid& g, double c, double dt, double clamp_frac)
      : m_(&m), g_(g), c_(c), dt_(dt) {
    const int n = g.N, w = stencil::w8;
    nc_ = std::max(2 * w, int(std::ceil(clamp_frac * n)));
    if (2 * nc_ + 1 > n) throw Error("config", "grid too small for the clamp");
    ni_ = n - 2 * nc_;
    lu_ = BandedLU(ni_, w, w, [&](int i, int j) { return cplx(0, i == j ? 1.0 : 0.0) - 0.5 * dt_ * Hent(i, j); });
  }

  int clamp() const { return nc_; }

  // H(i, j) on full-grid indices
  cplx Hent(int i, int j) const {
    const int k = j - i;
    if (std::abs(k) > stencil::w8) return 0.0;
    const double d1 = k == 0 ? 0.0 : (k > 0 ? stencil::d1_8[k] : -stencil::d1_8[-k]) / g_.h;
    const double d2 = stencil::d2_8[std::abs(k)] / (g_.h * g_.h);
    return cplx(-d2, c_ * d1);
  }

  std::vector<cplx> applyH(const std::vector<cplx>& v) const {
    const int n = int(v.size()), w = stencil::w8;
    std::vector<cplx> r(n);
    for (int i = 0; i < n; ++i) {
      cplx s = 0;
      for (int j = std::max(0, i - w); j <= std::min(n - 1, i + w); ++j) s += Hent(i, j) * v[j];
      r[i] = s;
    }
    return r;
  }

  double f_mid(double r0, double r1) const {
    static constexpr double xg[4] = {0.0694318442029737, 0.3300094782075719, 0.6699905217924281,
                                     0.9305681557970263};
    static constexpr double wg[4] = {0.1739274225803930, 0.3260725774196070, 0.3260725774196070,
                                     0.1739274225803930};
    double s = 0;
    for (int k = 0; k < 4; ++k) s += wg[k] * m_->f(r0 + xg[k] * (r1 - r0));
    return s;
  }

  // one step; guess holds a predictor for psi1 (or is empty). Returns iterations.
  int step(std::vector<cplx>& psi, const std::vector<cplx>& guess, double tol, int max_it) {
    const int n = g_.N;
    const auto Hp = applyH(psi);
    // constant part of the right-hand side on interior rows: (i + dt/2 H) psi0
    // over the interior columns plus dt H psi_b over the clamp (psi1 = psi0 there)
    std::vector<cplx> base(ni_);
    for (int r = 0; r < ni_; ++r) {
      const int i = r + nc_;
      base[r] = cplx(0, 1) * psi[i] + 0.5 * dt_ * Hp[i];
      cplx bnd = 0;
      for (int j = std::max(0, i - stencil::w8); j <= std::min(n - 1, i + stencil::w8); ++j)
        if (j < nc_ || j >= n - nc_) bnd += Hent(i, j) * psi[j];
      base[r] += 0.5 * dt_ * bnd;
    }
    std::vector<cplx> p1(psi.begin() + nc_, psi.begin() + nc_ + ni_);
    if (!guess.empty()) p1.assign(guess.begin() + nc_, guess.begin() + nc_ + ni_);
    std::vector<cplx> rhs(ni_);
    int it = 0;
    for (; it < max_it;) {
      ++it;
      for (int r = 0; r < ni_; ++r) {
        const cplx a = psi[r + nc_];
        const double fm = f_mid(std::norm(a), std::norm(p1[r]));
        rhs[r] = base[r] - 0.5 * dt_ * fm * (p1[r] + a);
      }
      lu_.solve(rhs);
      double d = 0, sc = 0;
      for (int r = 0; r < ni_; ++r) {
        d = std::fmax(d, std::abs(rhs[r] - p1[r]));
        sc = std::fmax(sc, std::abs(rhs[r]));
      }
      p1.swap(rhs);
      if (d <= tol * std::fmax(1.0, sc)) break;
    }
    std::copy(p1.begin(), p1.end(), psi.begin() + nc_);
    return it;
  }

  // <H_II psi, psi> + 2 Re <psi, H_IB psi_b> + h sum F over the interior
  double hamiltonian(const std::vector<cplx>& psi) const {
    const int n = g_.N;
    double s = 0;
    for (int i = nc_; i < n - nc_; ++i) {
      cplx a = 0, b = 0;
      for (int j = std::max(0, i - stencil::w8); j <= std::min(n - 1, i + stencil::w8); ++j) {
        if (j < nc_ || j >= n - nc_) b += Hent(i, j) * psi[j];
        else a += Hent(i, j) * psi[j];
      }
      s += (std::conj(psi[i]) * (a + 2.0 * b)).real() + m_->F(std::norm(psi[i]));
    }
    return g_.h * s;
  }

 private:
  const Model* m_;
  Grid g_;
  double c_, dt_;
  int nc_ = 0, ni_ = 0;
  BandedLU lu_;
};

// ref is the wave U the run is compared with (distances, mode tracking); it
// must live on the grid of the initial state.
inline RunResult evolve(const Model& m, const WaveProfile& ref, const FieldState& init, const EvolveOptions& o) {
  const Grid& g = ref.grid;
  if (int(init.psi.size()) != g.N) throw Error("config", "initial field is not on the reference grid");
  if (!(o.dt != 0) || !(o.T >= 0) || !(o.out_dt > 0)) throw Error("config", "need dt != 0, T >= 0, out_dt > 0");
  const bool track = !o.mode.empty();
  if (track && int(o.mode.size()) != g.N) throw Error("config", "mode is not on the reference grid");
  RunResult R;
  const double adt = std::fabs(o.dt);
  if (adt > o.accuracy_guard * g.h * g.h)
    R.warnings.push_back("dt exceeds the accuracy guard " + std::to_string(o.accuracy_guard) + " h^2");
  R.radiation_guard = o.T * (m.cs() + std::fabs(init.c_frame)) <= 0.4 * g.L;
  if (!R.radiation_guard)
    R.warnings.push_back("boundary radiation may reach |x| <= 0.6 L before T");

  Stepper S(m, g, init.c_frame, o.dt, o.clamp_frac);
  const auto U = ref.sample_complex();
  const int nsteps = int(std::lround(o.T / adt));
  const int stride = std::max(1, int(std::lround(o.out_dt / adt)));
  const double sgn = o.dt > 0 ? 1.0 : -1.0;

  std::vector<cplx> psi = init.psi, prev;
  double y_prev = 0;
  auto sample = [&](double t) {
    Sample s;
    s.t = t;
    s.E = energy_grid(m, g, psi);
    s.H = S.hamiltonian(psi);
    try {
      s.Pu = untwisted_momentum(m, g, psi).value;
    } catch (const Error&) {
    }
    if (o.distances) {
      OrbitalOptions oo;
      oo.y_center = y_prev;
      oo.y_range = o.y_range;
      try {
        const auto d = distance_hy(g, psi, U, oo);
        s.d_hy = d.value;
        y_prev = d.y;
      } catch (const Error&) {
      }
      oo.y_center = y_prev;
      s.d_Z = distance_Z(g, psi, U, oo).value;
    }
    if (track) {
      double a = 0, e = 0;
      const double grow = o.delta * std::exp(o.gamma * (t - init.t));
      for (int i = 0; i < g.N; ++i) {
        const cplx d = psi[i] - U[i];
        a += (std::conj(o.mode[i]) * d).real();
        e += std::norm(d - grow * o.mode[i]);
      }
      s.amp = g.h * a;
      s.track = std::sqrt(g.h * e);
    }
    R.samples.push_back(s);
    if (o.keep_snapshots) R.snapshots.push_back(psi);
  };

  const int nc = S.clamp();
  auto clamp_defect = [&] {
    for (int i = 0; i < g.N; ++i)
      if (i < nc || i >= g.N - nc) R.boundary_defect = std::fmax(R.boundary_defect, std::fabs(std::abs(psi[i]) - m.r0()));
  };
  clamp_defect();
  sample(init.t);
  std::vector<cplx> guess;
  for (int k = 1; k <= nsteps; ++k) {
    guess.clear();
    if (!prev.empty()) {
      guess.resize(g.N);
      for (int i = 0; i < g.N; ++i) guess[i] = 2.0 * psi[i] - prev[i];
    }
    prev = psi;
    R.max_fp_iters = std::max(R.max_fp_iters, S.step(psi, guess, o.fp_tol, o.fp_max));
    if (k % stride == 0 || k == nsteps) sample(init.t + sgn * k * adt);
  }
  if (R.max_fp_iters >= o.fp_max) R.warnings.push_back("fixed-point iteration hit its cap");
  R.final = {psi, init.t + sgn * nsteps * adt, init.c_frame};
  return R;
}

struct GrowthFit {
  double gamma = 0;
  double half_width = 0;  // 95% confidence half-width of the slope
  double t0 = 0, t1 = 0;
  int points = 0;
};

// Least-squares slope of log a(t) over samples in [t_lo, t_hi] with
// 0 < a <= 0.1 scale.
inline GrowthFit growth_rate(const std::vector<double>& t, const std::vector<double>& a, double t_lo = -INFINITY,
                             double t_hi = INFINITY, double scale = 1.0) {
  std::vector<double> X, Y;
  for (std::size_t i = 0; i < t.size(); ++i) {
    if (t[i] < t_lo || t[i] > t_hi || !(a[i] > 0) || a[i] > 0.1 * scale) continue;
    X.push_back(t[i]);
    Y.push_back(std::log(a[i]));
  }
  const int n = int(X.size());
  if (n < 3) throw Error("insufficient_growth", "fewer than 3 usable samples; use a smaller delta or a longer T");
  double mx = 0, my = 0;
  for (int i = 0; i < n; ++i) {
    mx += X[i];
    my += Y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0, sxy = 0;
  for (int i = 0; i < n; ++i) {
    sxx += (X[i] - mx) * (X[i] - mx);
    sxy += (X[i] - mx) * (Y[i] - my);
  }
  GrowthFit f;
  f.gamma = sxy / sxx;
  double rss = 0;
  for (int i = 0; i < n; ++i) {
    const double r = Y[i] - my - f.gamma * (X[i] - mx);
    rss += r * r;
  }
  f.half_width = n > 2 ? 1.96 * std::sqrt(rss / (n - 2) / sxx) : INFINITY;
  f.t0 = X.front();
  f.t1 = X.back();
  f.points = n;
  double lo = INFINITY, hi = -INFINITY;
  for (double y : Y) {
    lo = std::fmin(lo, y);
    hi = std::fmax(hi, y);
  }
  if (f.gamma * (f.t1 - f.t0) < 2 || hi - lo < 2)
    throw Error("insufficient_growth", "amplitude spans fewer than 2 e-foldings; use a smaller delta or a longer T");
  return f;
}

inline GrowthFit growth_rate(const RunResult& r, double t_lo = -INFINITY, double t_hi = INFINITY, double scale = 1.0) {
  std::vector<double> t, a;
  for (const auto& s : r.samples) {
    t.push_back(s.t);
    a.push_back(std::fabs(s.amp));
  }
  return growth_rate(t, a, t_lo, t_hi, scale);
}

// K = max over the second half of [0, t_max] of track / (delta^2 e^{2 gamma t})
inline double tracking_constant(const RunResult& r, double delta, double gamma, double t_max) {
  double K = 0;
  for (const auto& s : r.samples) {
    if (s.t < 0.5 * t_max || s.t > t_max) continue;
    K = std::fmax(K, s.track / (delta * delta * std::exp(2 * gamma * s.t)));
  }
  return K;
}

}  // namespace nlsw
