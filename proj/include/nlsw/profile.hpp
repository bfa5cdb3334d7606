#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include "nlsw/potential.hpp"
#include "nlsw/quadrature.hpp"

namespace nlsw {

// Uniform grid symmetric about 0: x_i = (i - (N-1)/2) h, half-length L.
struct Grid {
  double L = 0;
  int N = 0;
  double h = 0;
  double x(int i) const { return (i - 0.5 * (N - 1)) * h; }
  std::vector<double> points() const {
    std::vector<double> v(N);
    for (int i = 0; i < N; ++i) v[i] = x(i);
    return v;
  }
};

inline Grid grid_from_h(double h, double L) {
  if (!(h > 0) || !(L > 0)) throw Error("config", "grid needs positive h and L");
  const int n = std::max(1, int(std::lround(L / h)));
  return {L, 2 * n + 1, L / n};
}

inline Grid grid_from_N(int N, double L) {
  if (N < 3 || !(L > 0)) throw Error("config", "grid needs N >= 3 and positive L");
  return {L, N, 2 * L / (N - 1)};
}

// Half-branch x >= 0 of a travelling wave, parametrized so that every
// quantity is a smooth function of p. For p <= p1 we use t with
// xi = xi_c (1 - t^2), which removes the square-root turning point; past
// p1 we use z = ln(xi_c / xi), in which dx/dz -> 1/sqrt(cs^2 - c^2) and
// the logarithmic divergence of x(xi) at 0 disappears.
class Branch {
 public:
  Branch(const Model& m, double c, double xi_c, bool kink)
      : m_(&m), P_(m, c), c_(c), s_(xi_c), kink_(kink) {
    const double r02 = m.r02();
    if (!kink_) {
      slope_ = xi_c * P_.Wp(xi_c);
      if (!(slope_ > 0)) throw Error("no_wave", "turning point is not a simple root");
    }
    (void)r02;
  }

  static constexpr double p1 = std::numbers::sqrt2 / 2;
  static constexpr double z1 = std::numbers::ln2;

  double xi_c() const { return s_; }
  double c() const { return c_; }
  bool kink() const { return kink_; }
  const Potential& potential() const { return P_; }
  const Model& model() const { return *m_; }

  double p_of_ratio(double ratio) const { return p1 + (-std::log(ratio) - z1); }

  double xi(double p) const {
    if (p <= p1) return s_ * (1 - p) * (1 + p);
    return s_ * std::exp(-(z1 + (p - p1)));
  }

  double dxdp(double p) const {
    const double r02 = m_->r02();
    if (p <= p1) {
      const double t = p;
      const double x = s_ * (1 - t) * (1 + t);
      if (kink_) return m_->r0() / std::sqrt(m_->Fs(x));
      return 2 / ((1 - t) * (1 + t) * std::sqrt(r_t(t, x)));
    }
    const double x = xi(p);
    if (kink_) return std::fabs(x) / (2 * std::sqrt(r02 + x) * std::sqrt(m_->Fs(x)));
    return 1 / std::sqrt(-P_.W(x));
  }

  double u(double x) const { return c_ * x / (2 * (m_->r02() + x)); }

  // d eta / dx on x > 0
  double deta(double x) const {
    if (kink_) return 2 * std::sqrt(m_->r02() + x) * std::sqrt(std::fmax(m_->Fs(x), 0.0));
    const double w = -P_.W(x);
    return -(s_ > 0 ? 1.0 : -1.0) * std::fabs(x) * std::sqrt(std::fmax(w, 0.0));
  }

  // integral over [pa, pb] of {dx/dp, dphi/dp}
  std::array<double, 2> xphi(double pa, double pb, double tol = 1e-15) const {
    auto g = [this](double p) {
      const double d = dxdp(p);
      return std::array<double, 2>{d, kink_ ? 0.0 : u(xi(p)) * d};
    };
    std::array<double, 2> acc{0, 0};
    auto add = [&](double a, double b) {
      if (b <= a) return;
      auto r = integrate(g, a, b, 1e-300, tol);
      acc[0] += r.value[0];
      acc[1] += r.value[1];
    };
    if (pa < p1 && pb > p1) {
      add(pa, p1);
      add(p1, pb);
    } else {
      add(pa, pb);
    }
    return acc;
  }

  // Integral over x in [0, inf) of g(xi) where g decays with xi; z-part is
  // cut where |xi| < cut*|xi_c| and the remainder estimated geometrically.
  template <class G>
  auto half_line(G g, double cut = 1e-22, double tol = 1e-14) const {
    auto h = [&](double p) {
      auto v = g(xi(p));
      const double d = dxdp(p);
      if constexpr (std::is_same_v<decltype(v), double>) return v * d;
      else {
        for (auto& e : v) e *= d;
        return v;
      }
    };
    auto a = integrate(h, 0.0, p1, 1e-300, tol).value;
    const double pe = p_of_ratio(cut);
    // split the z-range so the adaptive rule sees the decay scale
    double lo = p1;
    for (double step = 2.0; lo < pe; step *= 1.5) {
      const double hi = std::fmin(pe, lo + step);
      auto b = integrate(h, lo, hi, 1e-300, tol).value;
      if constexpr (std::is_same_v<decltype(a), double>) a += b;
      else
        for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
      lo = hi;
    }
    return a;
  }

 private:
  // -W(xi)/t^2 near the turning point, with its Taylor limit for tiny t
  double r_t(double t, double x) const {
    if (t < 1e-5) return slope_;
    return -P_.W(x) / (t * t);
  }

  const Model* m_;
  Potential P_;
  double c_, s_;
  bool kink_;
  double slope_ = 0;
};

struct Tail {
  bool algebraic = false;
  double rate = 0;       // exponential rate, or algebraic exponent (negative)
  double amplitude = 0;  // eta ~ amplitude * exp(-rate x) or amplitude * x^exponent
  double x_stitch = std::numeric_limits<double>::infinity();
};

struct WaveProfile {
  double c = 0;
  double xi_c = 0;
  double r02 = 1;
  Existence status = Existence::no_wave;
  Grid grid;
  std::vector<double> x, eta, A, u, phi, deta;
  double theta_c = 0;
  Tail tail;

  bool kink() const { return status == Existence::kink; }

  std::vector<std::complex<double>> sample_complex() const {
    std::vector<std::complex<double>> U(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) U[i] = std::polar(A[i], phi[i]);
    return U;
  }
};

struct ProfileOptions {
  std::optional<double> h;   // auto: 0.05, finer when |U| nearly vanishes
  std::optional<double> L;   // auto: 30 / sqrt(cs^2 - c^2)
  std::optional<int> N;      // overrides h when set
  double stitch = 1e-8;      // tail stitch at |eta| = stitch |xi_c|; 0 disables
  bool allow_infinite_energy = false;  // sonic m >= 3
  ScanOptions scan;
};

// The phase turns by about pi over a width sqrt(2 rho_min / eta''(0)) around
// the minimum of |U|; the trapezoid rule loses exp(-2 pi width / h) there.
inline double auto_step(const Model& m, double c, double xi_c) {
  const double rho = m.r02() + xi_c;
  const double curv = -0.5 * Potential(m, c).Vp(xi_c);
  if (!(rho > 0) || !(curv > 0)) return 0.05;
  return std::clamp(0.25 * std::sqrt(2 * rho / curv), 1e-3, 0.05);
}

inline double auto_half_length(const Model& m, double c) {
  const double k2 = m.cs() * m.cs() - c * c;
  if (!(k2 > 0)) throw Error("config", "sonic profiles need an explicit L");
  return 30 / std::sqrt(k2);
}

namespace detail {

struct PointValues {
  double eta, u, phi, deta;
};

// Profile values at sorted nonnegative abscissae.
inline std::vector<PointValues> evaluate_half(const Branch& B, const std::vector<double>& xs,
                                              double stitch, Tail& tail, double& theta) {
  const Model& m = B.model();
  const double r02 = m.r02();
  const double c = B.c();
  const bool sonic = std::fabs(c - m.cs()) <= 1e-12 * m.cs();
  const double k = sonic ? 0.0 : std::sqrt(m.cs() * m.cs() - c * c);
  const double ps = stitch > 0 ? B.p_of_ratio(stitch) : std::numeric_limits<double>::infinity();

  double Xs = std::numeric_limits<double>::infinity(), Phs = 0, etas = 0;
  if (stitch > 0) {
    auto I = B.xphi(0, ps);
    Xs = I[0];
    Phs = I[1];
    etas = B.xi(ps);
  }

  std::vector<PointValues> out(xs.size());
  double pp = 0, Xp = 0, Pp = 0;
  for (std::size_t j = 0; j < xs.size(); ++j) {
    const double xj = xs[j];
    if (xj > Xs) {
      const double d = xj - Xs;
      double eta, ph, de;
      if (!sonic) {
        eta = etas * std::exp(-k * d);
        ph = Phs + c / (2 * r02) * etas / k * (-std::expm1(-k * d));
        de = -k * eta;
      } else {
        const double e = -2.0 / (m.m_index().value_or(0) + 1);
        eta = etas * std::pow(xj / Xs, e);
        ph = Phs;
        de = e * eta / xj;
      }
      out[j] = {eta, B.u(eta), ph, de};
      continue;
    }
    const double target = xj - Xp;
    double p = pp;
    std::array<double, 2> I{0, 0};
    if (target > 0) {
      double lo = pp, hi = ps;
      p = pp + target / B.dxdp(pp);
      for (int it = 0; it < 100; ++it) {
        if (!(p > lo && p < hi)) p = std::isfinite(hi) ? 0.5 * (lo + hi) : 2 * p - lo + 1;
        I = B.xphi(pp, p);
        const double G = I[0] - target;
        if (std::fabs(G) <= 2e-15 * std::fmax(1.0, xj)) break;
        if (G > 0) hi = p;
        else lo = p;
        const double pn = p - G / B.dxdp(p);
        if (pn == p) break;
        p = pn;
      }
    }
    pp = p;
    Xp += I[0];
    Pp += I[1];
    const double eta = B.xi(p);
    out[j] = {eta, B.u(eta), Pp, B.deta(eta)};
  }

  if (stitch > 0) {
    if (!sonic) {
      tail = {false, k, etas * std::exp(k * Xs), Xs};
      theta = Phs + c / (2 * r02) * etas / k;
    } else {
      tail = {true, -2.0 / (m.m_index().value_or(0) + 1), etas * std::pow(Xs, 2.0 / (m.m_index().value_or(0) + 1)), Xs};
      theta = Phs;
    }
  }
  if (stitch <= 0 || sonic) {
    if (!sonic) {
      const double pe = B.p_of_ratio(1e-17);
      auto I = B.xphi(0, pe);
      const double ee = B.xi(pe);
      theta = I[1] + c / (2 * r02) * ee / k;
      tail = {false, k, ee * std::exp(k * I[0]), std::numeric_limits<double>::infinity()};
    } else {
      theta = out.empty() ? 0.0 : out.back().phi;
      const double e = -2.0 / (m.m_index().value_or(0) + 1);
      if (!out.empty() && xs.back() > 0) tail = {true, e, out.back().eta * std::pow(xs.back(), -e), tail.x_stitch};
    }
  }
  return out;
}

}  // namespace detail

inline Branch make_branch(const Model& m, double c, const Verdict& v) {
  return Branch(m, c, *v.xi_c, v.status == Existence::kink);
}

// Samples the wave at arbitrary abscissae (any sign), using the parity of
// the profile: eta, u even; phi odd (kink: phase pi on x < 0).
struct Samples {
  std::vector<double> eta, u, phi, deta;
  double theta = 0;
  Tail tail;
};

inline Samples sample_wave(const Branch& B, const std::vector<double>& xs, double stitch = 1e-8) {
  std::vector<double> ax(xs.size());
  for (std::size_t i = 0; i < xs.size(); ++i) ax[i] = std::fabs(xs[i]);
  std::vector<double> sorted = ax;
  std::sort(sorted.begin(), sorted.end());
  sorted.erase(std::unique(sorted.begin(), sorted.end()), sorted.end());
  Samples S;
  auto vals = detail::evaluate_half(B, sorted, stitch, S.tail, S.theta);
  const std::size_t n = xs.size();
  S.eta.resize(n);
  S.u.resize(n);
  S.phi.resize(n);
  S.deta.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto it = std::lower_bound(sorted.begin(), sorted.end(), ax[i]);
    const auto& v = vals[it - sorted.begin()];
    const double sg = xs[i] < 0 ? -1.0 : 1.0;
    S.eta[i] = v.eta;
    S.u[i] = v.u;
    S.deta[i] = sg * v.deta;
    if (B.kink()) S.phi[i] = xs[i] < 0 ? std::numbers::pi : 0.0;
    else S.phi[i] = sg * v.phi;
  }
  if (B.kink()) S.theta = std::numbers::pi / 2;
  return S;
}

inline WaveProfile solve_profile(const Model& m, double c, const ProfileOptions& opt = {}) {
  const Verdict v = find_xi_c(m, c, opt.scan);
  if (!v.xi_c) throw Error("no_wave", "no travelling wave at c = " + std::to_string(c));
  if (v.status == Existence::sonic) {
    const int mi = m.m_index().value_or(99);
    if (mi > 2 && !opt.allow_infinite_energy)
      throw Error("infinite_energy", "sonic wave with m >= 3 has infinite energy");
    c = m.cs();
  }
  const double L = opt.L ? *opt.L : auto_half_length(m, c);
  const Grid g = opt.N ? grid_from_N(*opt.N, L) : grid_from_h(opt.h ? *opt.h : auto_step(m, c, *v.xi_c), L);
  const Branch B = make_branch(m, c, v);

  WaveProfile P;
  P.c = c;
  P.xi_c = *v.xi_c;
  P.r02 = m.r02();
  P.status = v.status;
  P.grid = g;
  P.x = g.points();
  auto S = sample_wave(B, P.x, opt.stitch);
  P.eta = std::move(S.eta);
  P.u = std::move(S.u);
  P.phi = std::move(S.phi);
  P.deta = std::move(S.deta);
  P.theta_c = S.theta;
  P.tail = S.tail;
  P.A.resize(P.x.size());
  for (std::size_t i = 0; i < P.x.size(); ++i) P.A[i] = std::sqrt(std::fmax(P.r02 + P.eta[i], 0.0));
  return P;
}

struct DecayFit {
  bool algebraic = false;
  double rate = 0;  // decay rate (exponential) or exponent (algebraic, negative)
  double amplitude = 0;
};

// Least-squares fit of log|eta| on the window [lo L, hi L].
inline DecayFit decay_fit(const WaveProfile& P, double lo = 0.6, double hi = 0.9) {
  const bool alg = P.status == Existence::sonic;
  const double L = P.grid.L;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (std::size_t i = 0; i < P.x.size(); ++i) {
    const double x = P.x[i];
    if (x < lo * L || x > hi * L) continue;
    const double e = std::fabs(P.eta[i]);
    if (!(e > 1e-290)) throw Error("tail_underflow", "tail underflows in the fit window; use a smaller L");
    const double X = alg ? std::log(x) : x;
    const double Y = std::log(e);
    sx += X;
    sy += Y;
    sxx += X * X;
    sxy += X * Y;
    ++n;
  }
  if (n < 3) throw Error("tail_underflow", "too few points in the fit window");
  const double b = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  const double a = (sy - b * sx) / n;
  return {alg, alg ? b : -b, std::exp(a)};
}

}  // namespace nlsw
