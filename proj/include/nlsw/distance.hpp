#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "nlsw/fields.hpp"

namespace nlsw {

struct HyParts {
  double A = 0, dA = 0;  // L2 norms of A - A~ and its derivative
  double dphi = 0;       // L2 norm of phi' - phi~'
  double arg0 = 0;       // |arg(psi(0) / psi~(0))|
  double value() const { return std::sqrt(A * A + dA * dA) + dphi + arg0; }
};

struct ZParts {
  double dpsi = 0;  // L2 norm of psi' - psi~'
  double mod = 0;   // L2 norm of |psi| - |psi~|
  double at0 = 0;   // |psi(0) - psi~(0)|
  double value() const { return dpsi + mod + at0; }
};

namespace detail {

inline std::vector<double> phase_derivative(const std::vector<cplx>& psi, const std::vector<cplx>& d) {
  std::vector<double> r(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) r[i] = (std::conj(psi[i]) * d[i]).imag() / std::norm(psi[i]);
  return r;
}

inline void require_nonvanishing(const std::vector<cplx>& psi) {
  double mx = 0, mn = INFINITY;
  for (auto z : psi) {
    mx = std::fmax(mx, std::abs(z));
    mn = std::fmin(mn, std::abs(z));
  }
  if (!(mn > 1e-10 * mx))
    throw Error("vanishing", "the field vanishes; the hydrodynamical distance is undefined");
}

}  // namespace detail

inline HyParts distance_hy_parts(const Grid& g, const std::vector<cplx>& a, const std::vector<cplx>& b) {
  detail::require_nonvanishing(a);
  detail::require_nonvanishing(b);
  const double h = g.h;
  const auto Aa = modulus(a), Ab = modulus(b);
  const auto da = derivative(a, h), db = derivative(b, h);
  const auto dAa = derivative(Aa, h), dAb = derivative(Ab, h);
  const auto pa = detail::phase_derivative(a, da), pb = detail::phase_derivative(b, db);
  const std::size_t n = a.size();
  std::vector<double> e1(n), e2(n), e3(n);
  for (std::size_t i = 0; i < n; ++i) {
    e1[i] = Aa[i] - Ab[i];
    e2[i] = dAa[i] - dAb[i];
    e3[i] = pa[i] - pb[i];
  }
  HyParts r;
  r.A = l2(e1, h);
  r.dA = l2(e2, h);
  r.dphi = l2(e3, h);
  r.arg0 = std::fabs(std::arg(value_at_zero(g, a) / value_at_zero(g, b)));
  return r;
}

inline ZParts distance_Z_parts(const Grid& g, const std::vector<cplx>& a, const std::vector<cplx>& b) {
  const double h = g.h;
  const auto da = derivative(a, h), db = derivative(b, h);
  const std::size_t n = a.size();
  std::vector<cplx> e1(n);
  std::vector<double> e2(n);
  for (std::size_t i = 0; i < n; ++i) {
    e1[i] = da[i] - db[i];
    e2[i] = std::abs(a[i]) - std::abs(b[i]);
  }
  return {l2(e1, h), l2(e2, h), std::abs(value_at_zero(g, a) - value_at_zero(g, b))};
}

inline double distance_hy_raw(const Grid& g, const std::vector<cplx>& a, const std::vector<cplx>& b) {
  return distance_hy_parts(g, a, b).value();
}
inline double distance_Z_raw(const Grid& g, const std::vector<cplx>& a, const std::vector<cplx>& b) {
  return distance_Z_parts(g, a, b).value();
}

struct OrbitalOptions {
  double y_center = 0;
  double y_range = 2.0;  // scan |y - y_center| <= y_range
  double y_step = 0;     // 0: two grid steps
  double y_tol = 1e-7;
};

struct OrbitalDistance {
  double value = 0, y = 0, theta = 0;
};

namespace detail {

// golden-section minimum of a unimodal f on [a, b]
template <class Fn>
std::pair<double, double> golden(Fn f, double a, double b, double tol) {
  const double r = 0.5 * (std::sqrt(5.0) - 1);
  double c = b - r * (b - a), d = a + r * (b - a);
  double fc = f(c), fd = f(d);
  while (b - a > tol) {
    if (fc < fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - r * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + r * (b - a);
      fd = f(d);
    }
  }
  return fc < fd ? std::pair{c, fc} : std::pair{d, fd};
}

// inf over y of dist(y) by a scan followed by golden-section refinement
template <class Fn>
std::pair<double, double> minimize_shift(Fn dist, const Grid& g, const OrbitalOptions& o) {
  const double step = o.y_step > 0 ? o.y_step : 2 * g.h;
  const int k = std::max(1, int(std::ceil(o.y_range / step)));
  double by = o.y_center, bv = INFINITY;
  for (int j = -k; j <= k; ++j) {
    const double y = o.y_center + j * step;
    const double v = dist(y);
    if (v < bv) {
      bv = v;
      by = y;
    }
  }
  auto [y, v] = golden(dist, by - step, by + step, o.y_tol);
  return v < bv ? std::pair{y, v} : std::pair{by, bv};
}

}  // namespace detail

// inf_{y, theta} d_hy(psi, e^{i theta} ref(. - y)). The phase only enters
// through the arg term, which theta = arg(psi(0) / ref(-y)) sets to zero.
inline OrbitalDistance distance_hy(const Grid& g, const std::vector<cplx>& psi, const std::vector<cplx>& ref,
                                   const OrbitalOptions& o = {}) {
  detail::require_nonvanishing(psi);
  detail::require_nonvanishing(ref);
  auto dist = [&](double y) {
    const auto r = distance_hy_parts(g, psi, shifted(g, ref, y));
    return r.value() - r.arg0;
  };
  auto [y, v] = detail::minimize_shift(dist, g, o);
  OrbitalDistance r{v, y, 0.0};
  r.theta = std::arg(value_at_zero(g, psi) / interpolate(g, ref, -y));
  return r;
}

// inf_{y, theta} d_Z(psi, e^{i theta} ref(. - y)); theta by a coarse scan and
// golden-section, using that only two inner products depend on it.
inline OrbitalDistance distance_Z(const Grid& g, const std::vector<cplx>& psi, const std::vector<cplx>& ref,
                                  const OrbitalOptions& o = {}) {
  const double h = g.h;
  const auto dpsi = derivative(psi, h);
  const auto Apsi = modulus(psi);
  const cplx p0 = value_at_zero(g, psi);
  auto theta_min = [&](double y, double* th) {
    const auto r = shifted(g, ref, y);
    const auto dr = derivative(r, h);
    double D0 = 0, mod = 0;
    cplx C = 0;
    for (std::size_t i = 0; i < r.size(); ++i) {
      D0 += std::norm(dpsi[i] - dr[i]);
      C += std::conj(dr[i]) * dpsi[i];
      const double e = Apsi[i] - std::abs(r[i]);
      mod += e * e;
    }
    mod = std::sqrt(h * mod);
    const cplx r0 = interpolate(g, ref, -y);
    auto f = [&](double t) {
      // |dpsi - e^{it} dr|^2 = D0 + 2 Re((1 - e^{-it}) C), exact at t = 0
      const double s = std::sin(0.5 * t);
      const double q = std::fmax(D0 + 2 * (cplx(2 * s * s, std::sin(t)) * C).real(), 0.0);
      return std::sqrt(h * q) + mod + std::abs(p0 - std::polar(1.0, t) * r0);
    };
    const int K = 32;
    double bt = 0, bv = INFINITY;
    for (int j = 0; j < K; ++j) {
      const double t = -std::numbers::pi + 2 * std::numbers::pi * (j + 1) / K;
      const double v = f(t);
      if (v < bv) {
        bv = v;
        bt = t;
      }
    }
    const double w = 2 * std::numbers::pi / K;
    auto [t, v] = detail::golden(f, bt - w, bt + w, 1e-10);
    if (v < bv) {
      bv = v;
      bt = t;
    }
    if (th) *th = std::remainder(bt, 2 * std::numbers::pi);
    return bv;
  };
  auto [y, v] = detail::minimize_shift([&](double y) { return theta_min(y, nullptr); }, g, o);
  OrbitalDistance r{v, y, 0.0};
  theta_min(y, &r.theta);
  // the expanded square root above cancels near zero; evaluate directly
  auto rot = shifted(g, ref, y);
  for (auto& z : rot) z *= std::polar(1.0, r.theta);
  r.value = std::fmin(v, distance_Z_raw(g, psi, rot));
  return r;
}

// exp(i phi*) with phi* = (ln x)^2 / 2 on x >= 1, and exp(i (phi* + phi_n))
// with phi_n the trapezoid 0 -> pi -> pi -> 0 over [0, 3 n pi].
struct CestfauxPair {
  Grid grid;
  std::vector<cplx> base, bent;
};

inline CestfauxPair cestfaux_pair(double n, double h) {
  const double L = 3 * n * std::numbers::pi + 20;
  CestfauxPair p;
  p.grid = grid_from_h(h, L);
  const auto x = p.grid.points();
  p.base.resize(x.size());
  p.bent.resize(x.size());
  const double a = n * std::numbers::pi;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double t = x[i];
    const double ps = t >= 1 ? 0.5 * std::log(t) * std::log(t) : 0.0;
    double pn = 0;
    if (t > 0 && t < a) pn = t / n;
    else if (t >= a && t <= 2 * a) pn = std::numbers::pi;
    else if (t > 2 * a && t < 3 * a) pn = 3 * std::numbers::pi - t / n;
    p.base[i] = std::polar(1.0, ps);
    p.bent[i] = std::polar(1.0, ps + pn);
  }
  return p;
}

}  // namespace nlsw
