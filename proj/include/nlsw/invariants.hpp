#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <exception>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "nlsw/profile.hpp"

namespace nlsw {

// Energy density of a travelling wave as a function of eta, using the
// first integral for |d_x A|^2.
inline double energy_density(const Potential& V, double xi, bool kink) {
  const Model& m = V.model();
  const double F = m.Fs(xi);
  if (kink) return 2 * F;
  const double rho = m.r02() + xi;
  const double u = V.c() * xi / (2 * rho);
  return -xi * xi * V.W(xi) / (4 * rho) + rho * u * u + F;
}

namespace detail {

// trapezoid over the grid plus analytic tails beyond +-L
inline double line_integral(const WaveProfile& P, const std::vector<double>& e, double decay_power) {
  const double h = P.grid.h;
  double s = 0;
  for (double v : e) s += v;
  const double ends = e.front() + e.back();
  s = h * (s - 0.5 * ends);
  if (!P.tail.algebraic) {
    const double k = decay_power * P.tail.rate;
    if (k > 0) s += ends / k;
  } else {
    const double p = -decay_power * P.tail.rate;  // e ~ x^-p
    if (p > 1) s += ends * P.grid.L / (p - 1);
  }
  return s;
}

}  // namespace detail

inline double energy(const Model& m, const WaveProfile& P) {
  if (P.status == Existence::sonic && m.m_index().value_or(99) > 2)
    throw Error("infinite_energy", "sonic wave with m >= 3 has infinite energy");
  const Potential V(m, P.c);
  std::vector<double> e(P.x.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = energy_density(V, P.eta[i], P.kink());
  return detail::line_integral(P, e, 2.0);
}

inline double momentum_grid(const WaveProfile& P) {
  std::vector<double> e(P.x.size());
  for (std::size_t i = 0; i < e.size(); ++i) e[i] = P.eta[i] * P.u[i];
  return detail::line_integral(P, e, 2.0);
}

struct EnergyMomentum {
  double E = 0, P = 0;
  bool kink_limit = false;  // P reported as the c -> 0 limit r0^2 pi
};

// E and P by quadrature along the branch parametrization (no x-grid).
inline EnergyMomentum energy_momentum_xi(const Model& m, double c, const ScanOptions& scan = {}) {
  const Verdict v = find_xi_c(m, c, scan);
  if (!v.xi_c) throw Error("no_wave", "no travelling wave at c = " + std::to_string(c));
  if (v.status == Existence::sonic) {
    if (m.m_index().value_or(99) > 2) throw Error("infinite_energy", "sonic wave with m >= 3");
    c = m.cs();
  }
  const Branch B = make_branch(m, c, v);
  const bool kink = B.kink();
  const Potential& V = B.potential();
  const double r02 = m.r02();
  const double cut = v.status == Existence::sonic ? 1e-60 : 1e-22;
  auto half = B.half_line(
      [&](double xi) {
        const double pw = kink ? 0.0 : xi * xi / (r02 + xi);
        return std::array<double, 2>{energy_density(V, xi, kink), pw};
      },
      cut);
  EnergyMomentum r;
  r.E = 2 * half[0];
  if (kink) {
    r.P = r02 * std::numbers::pi;
    r.kink_limit = true;
  } else {
    r.P = c * half[1];
  }
  return r;
}

inline double momentum_xi(const Model& m, double c) { return energy_momentum_xi(m, c).P; }
inline double energy_xi(const Model& m, double c) { return energy_momentum_xi(m, c).E; }

inline double kink_energy(const Model& m) {
  if (find_xi_c(m, 0.0).status != Existence::kink) throw Error("no_kink", "model has no kink");
  const double r0 = m.r0();
  auto r = integrate([&](double s) { return std::sqrt(m.Fs((s - r0) * (s + r0))); }, 0.0, r0, 1e-300, 1e-14);
  return 4 * r.value;
}

struct KinkDerivative {
  double dPdc0 = 0;
  double VK0 = 0;
};

inline KinkDerivative kink_dPdc(const Model& m) {
  if (find_xi_c(m, 0.0).status != Existence::kink) throw Error("no_kink", "model has no kink");
  const double r0 = m.r0(), r02 = m.r02();
  const double F0 = m.F(0.0), sF0 = std::sqrt(F0);
  // rho = s^2 turns rho^(-3/2) d rho into 2 s^-2 ds; the bracket is O(s^2)
  auto g = [&](double s) {
    const double xi = (s - r0) * (s + r0);
    const double F = m.Fs(xi);
    const double sF = std::sqrt(F);
    const double D = m.int_f(0.0, s * s);  // F(0) - F(s^2)
    const double br = D / (sF * sF0 * (sF + sF0));
    return xi * xi / (s * s) * br;
  };
  auto r = integrate(g, 0.0, r0, 1e-300, 1e-13);
  KinkDerivative k;
  k.dPdc0 = -8 * r0 * r02 / (3 * sF0) + r.value;
  k.VK0 = k.dPdc0 / (2 * std::numbers::sqrt2);
  return k;
}

inline double bubble_dPdc0(const Model& m) {
  const Verdict v = find_xi_c(m, 0.0);
  if (v.status == Existence::kink) throw Error("kink", "c = 0 wave is a kink; use kink_dPdc");
  if (!v.xi_c) throw Error("no_wave", "no stationary bubble");
  const Branch B = make_branch(m, 0.0, v);
  const double r02 = m.r02();
  return std::fabs(B.half_line([&](double xi) { return xi * xi / (r02 + xi); }));
}

enum class Stability { stable, unstable, cusp_unstable, undetermined };

inline const char* stability_name(Stability s) {
  switch (s) {
    case Stability::stable: return "stable";
    case Stability::unstable: return "unstable";
    case Stability::cusp_unstable: return "cusp_unstable";
    case Stability::undetermined: return "undetermined";
  }
  return "?";
}

struct BranchPoint {
  double c = 0;
  bool exists = false;
  Existence status = Existence::no_wave;
  double E = NAN, P = NAN, dPdc = NAN, d2Pdc2 = NAN, dEdc = NAN;
  double hamilton_residual = NAN;
  bool one_sided = false;
  Stability verdict = Stability::undetermined;
};

struct KinkEndpoint {
  double P_limit = NAN;
  double dPdc_at_0 = NAN;
  double dPdc_extrapolated = NAN;
  double E_kink = NAN;
};

struct Cusp {
  double c, P, d2Pdc2;
};

struct BranchDiagram {
  std::vector<BranchPoint> points;
  std::optional<KinkEndpoint> kink;
  std::vector<Cusp> cusps;
};

struct BranchDerivatives {
  double E, P, dEdc, dPdc, d2Pdc2;
  bool one_sided;
};

namespace detail {

inline std::optional<EnergyMomentum> try_ep(const Model& m, double c) {
  if (c <= 0 || c >= m.cs() * (1 - 1e-12)) return std::nullopt;
  auto v = find_xi_c(m, c);
  if (!v.xi_c) return std::nullopt;
  return energy_momentum_xi(m, c);
}

}  // namespace detail

// Richardson-extrapolated finite differences of E(c), P(c) along the branch.
inline std::optional<BranchDerivatives> branch_derivatives(const Model& m, double c, double hc = 0) {
  const double cs = m.cs();
  const double h = hc > 0 ? hc : std::fmax(1e-3, 0.01 * (cs - c));
  auto p0 = detail::try_ep(m, c);
  if (!p0) return std::nullopt;
  auto pp = detail::try_ep(m, c + h), pph = detail::try_ep(m, c + h / 2);
  auto pm = detail::try_ep(m, c - h), pmh = detail::try_ep(m, c - h / 2);
  BranchDerivatives d{p0->E, p0->P, 0, 0, 0, false};
  auto rich2 = [](double dh, double dh2) { return (4 * dh2 - dh) / 3; };
  if (pp && pph && pm && pmh) {
    auto d1 = [&](double a, double b, double hh) { return (a - b) / (2 * hh); };
    auto d2 = [&](double a, double z, double b, double hh) { return (a - 2 * z + b) / (hh * hh); };
    d.dPdc = rich2(d1(pp->P, pm->P, h), d1(pph->P, pmh->P, h / 2));
    d.dEdc = rich2(d1(pp->E, pm->E, h), d1(pph->E, pmh->E, h / 2));
    d.d2Pdc2 = rich2(d2(pp->P, p0->P, pm->P, h), d2(pph->P, p0->P, pmh->P, h / 2));
    return d;
  }
  // one-sided: need c + s h/2, c + s h, c + 3 s h/2, c + 2 s h
  for (double sg : {-1.0, 1.0}) {
    std::array<std::optional<EnergyMomentum>, 4> q;
    bool ok = true;
    for (int k = 0; k < 4; ++k) {
      q[k] = detail::try_ep(m, c + sg * (k + 1) * h / 2);
      ok = ok && q[k];
    }
    if (!ok) continue;
    auto D1 = [&](double f0, double f1, double f2, double hh) { return sg * (-3 * f0 + 4 * f1 - f2) / (2 * hh); };
    auto D2 = [&](double f0, double f1, double f2, double hh) { return (f0 - 2 * f1 + f2) / (hh * hh); };
    d.dPdc = rich2(D1(p0->P, q[1]->P, q[3]->P, h), D1(p0->P, q[0]->P, q[1]->P, h / 2));
    d.dEdc = rich2(D1(p0->E, q[1]->E, q[3]->E, h), D1(p0->E, q[0]->E, q[1]->E, h / 2));
    d.d2Pdc2 = 2 * D2(p0->P, q[0]->P, q[1]->P, h / 2) - D2(p0->P, q[1]->P, q[3]->P, h);
    d.one_sided = true;
    return d;
  }
  return std::nullopt;
}

inline Stability classify_derivatives(double dPdc, double d2Pdc2, double P, double cs) {
  const double tol = 1e-4 * std::fmax(1.0, std::fabs(P) / cs);
  if (!std::isfinite(dPdc)) return Stability::undetermined;
  if (dPdc < -tol) return Stability::stable;
  if (dPdc > tol) return Stability::unstable;
  if (std::isfinite(d2Pdc2) && std::fabs(d2Pdc2) >= 1e-2) return Stability::cusp_unstable;
  return Stability::undetermined;
}

inline BranchPoint branch_point(const Model& m, double c) {
  BranchPoint b;
  b.c = c;
  const Verdict v = find_xi_c(m, c);
  b.status = v.status;
  if (!v.xi_c) return b;
  b.exists = true;
  const double cs = m.cs();
  if (c == 0) {
    if (v.status == Existence::kink) {
      b.E = kink_energy(m);
      b.P = m.r02() * std::numbers::pi;
      b.dPdc = kink_dPdc(m).dPdc0;
      b.verdict = b.dPdc < 0 ? Stability::stable : Stability::unstable;
    } else {
      auto ep = energy_momentum_xi(m, 0.0);
      b.E = ep.E;
      b.P = ep.P;
      b.dPdc = bubble_dPdc0(m);
      b.verdict = Stability::unstable;
    }
    return b;
  }
  if (v.status == Existence::sonic) {
    if (m.m_index().value_or(99) <= 2) {
      auto ep = energy_momentum_xi(m, c);
      b.E = ep.E;
      b.P = ep.P;
    }
    return b;
  }
  auto d = branch_derivatives(m, c);
  if (!d) {
    auto ep = energy_momentum_xi(m, c);
    b.E = ep.E;
    b.P = ep.P;
    return b;
  }
  b.E = d->E;
  b.P = d->P;
  b.dPdc = d->dPdc;
  b.dEdc = d->dEdc;
  b.d2Pdc2 = d->d2Pdc2;
  b.one_sided = d->one_sided;
  b.hamilton_residual = std::fabs(d->dEdc - c * d->dPdc) / std::fmax(1.0, std::fabs(d->dEdc));
  b.verdict = classify_derivatives(b.dPdc, b.d2Pdc2, b.P, cs);
  return b;
}

// quadratic extrapolation to 0 from samples at c, c/2, c/4 (Neville)
inline double extrapolate0(const std::array<double, 3>& cs, const std::array<double, 3>& v) {
  double p[3] = {v[0], v[1], v[2]};
  for (int k = 1; k < 3; ++k)
    for (int i = 2; i >= k; --i) p[i] = (cs[i - k] * p[i] - cs[i] * p[i - 1]) / (cs[i - k] - cs[i]);
  return p[2];
}

inline KinkEndpoint kink_endpoint(const Model& m) {
  KinkEndpoint k;
  k.E_kink = kink_energy(m);
  k.dPdc_at_0 = kink_dPdc(m).dPdc0;
  // sample speeds scaled so that GP uses {0.04, 0.02, 0.01}
  const double sc = std::fmin(1.0, m.cs() / std::numbers::sqrt2);
  const std::array<double, 3> cc = {0.04 * sc, 0.02 * sc, 0.01 * sc};
  std::array<double, 3> P, D;
  for (int i = 0; i < 3; ++i) {
    P[i] = momentum_xi(m, cc[i]);
    const double h = cc[i] / 4;
    const double d1 = (momentum_xi(m, cc[i] + h) - momentum_xi(m, cc[i] - h)) / (2 * h);
    const double d2 = (momentum_xi(m, cc[i] + h / 2) - momentum_xi(m, cc[i] - h / 2)) / h;
    D[i] = (4 * d2 - d1) / 3;
  }
  k.P_limit = extrapolate0(cc, P);
  k.dPdc_extrapolated = extrapolate0(cc, D);
  return k;
}

// threads > 1 evaluates the branch points concurrently (Model is read-only)
inline BranchDiagram diagram(const Model& m, double c_min, double c_max, int n, int threads = 1) {
  const double cs = m.cs();
  if (!(c_min >= 0) || !(c_max > c_min) || c_max > cs * (1 + 1e-12) || n < 2)
    throw Error("config", "diagram needs 0 <= c_min < c_max <= cs and n >= 2");
  BranchDiagram D;
  D.points.resize(n);
  auto speed = [&](int i) { return i == n - 1 ? c_max : c_min + (c_max - c_min) * i / (n - 1); };
  const int nt = std::clamp(threads, 1, n);
  if (nt == 1) {
    for (int i = 0; i < n; ++i) D.points[i] = branch_point(m, speed(i));
  } else {
    std::vector<std::exception_ptr> errs(nt);
    std::vector<std::thread> pool;
    for (int t = 0; t < nt; ++t)
      pool.emplace_back([&, t] {
        try {
          for (int i = t; i < n; i += nt) D.points[i] = branch_point(m, speed(i));
        } catch (...) {
          errs[t] = std::current_exception();
        }
      });
    for (auto& th : pool) th.join();
    for (auto& e : errs)
      if (e) std::rethrow_exception(e);
  }
  if (find_xi_c(m, 0.0).status == Existence::kink) D.kink = kink_endpoint(m);
  for (int i = 0; i + 1 < n; ++i) {
    const auto& a = D.points[i];
    const auto& b = D.points[i + 1];
    if (!(a.c > 0) || !std::isfinite(a.dPdc) || !std::isfinite(b.dPdc)) continue;
    if ((a.dPdc < 0) == (b.dPdc < 0)) continue;
    double lo = a.c, hi = b.c;
    const bool lo_neg = a.dPdc < 0;
    for (int it = 0; it < 40; ++it) {
      const double mid = 0.5 * (lo + hi);
      auto d = branch_derivatives(m, mid);
      if (!d) break;
      if ((d->dPdc < 0) == lo_neg) lo = mid;
      else hi = mid;
    }
    // a jump between branches also flips the sign; a cusp needs dP/dc -> 0
    auto dl = branch_derivatives(m, lo), dh = branch_derivatives(m, hi);
    if (!dl || !dh) continue;
    const double scale = 1e-3 * std::fmax(1.0, std::fabs(dl->P) / cs);
    if (std::fabs(dl->dPdc) > scale || std::fabs(dh->dPdc) > scale) continue;
    const double cc = 0.5 * (lo + hi);
    auto d = branch_derivatives(m, cc);
    if (d) D.cusps.push_back({cc, d->P, d->d2Pdc2});
  }
  return D;
}

}  // namespace nlsw
