#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "nlsw/invariants.hpp"
#include "nlsw/spectrum.hpp"

namespace nlsw {

// Functionals of sampled fields psi(x_i) on a centred uniform grid.

// Eighth-order centred derivative, fields extended by their end values.
template <class T>
std::vector<T> derivative(const std::vector<T>& v, double h) {
  const int n = int(v.size()), w = stencil::w8;
  std::vector<T> r(n);
  auto at = [&](int i) { return v[std::clamp(i, 0, n - 1)]; };
  for (int i = 0; i < n; ++i) {
    T s{};
    for (int k = 1; k <= w; ++k) s += stencil::d1_8[k] * (at(i + k) - at(i - k));
    r[i] = s / h;
  }
  return r;
}

// 8-point Lagrange interpolation of samples v on g at x; constant beyond the ends.
template <class T>
T interpolate(const Grid& g, const std::vector<T>& v, double x) {
  const int n = int(v.size());
  const double s = (x - g.x(0)) / g.h;
  if (s <= 0) return v.front();
  if (s >= n - 1) return v.back();
  int i0 = int(std::floor(s)) - 3;
  i0 = std::clamp(i0, 0, std::max(0, n - 8));
  const int m = std::min(8, n);
  T acc{};
  for (int a = 0; a < m; ++a) {
    double w = 1;
    for (int b = 0; b < m; ++b)
      if (b != a) w *= (s - (i0 + b)) / double(a - b);
    acc += w * v[i0 + a];
  }
  return acc;
}

// samples of v(x_i - y)
template <class T>
std::vector<T> shifted(const Grid& g, const std::vector<T>& v, double y) {
  std::vector<T> r(v.size());
  for (int i = 0; i < int(v.size()); ++i) r[i] = interpolate(g, v, g.x(i) - y);
  return r;
}

inline std::vector<double> modulus(const std::vector<cplx>& psi) {
  std::vector<double> a(psi.size());
  for (std::size_t i = 0; i < psi.size(); ++i) a[i] = std::abs(psi[i]);
  return a;
}

inline double l2(const std::vector<double>& v, double h) {
  double s = 0;
  for (double a : v) s += a * a;
  return std::sqrt(h * s);
}
inline double l2(const std::vector<cplx>& v, double h) {
  double s = 0;
  for (auto a : v) s += std::norm(a);
  return std::sqrt(h * s);
}

inline cplx value_at_zero(const Grid& g, const std::vector<cplx>& psi) { return interpolate(g, psi, 0.0); }

// E = int |psi'|^2 + F(|psi|^2), over the rows whose stencil lies in the box
inline double energy_grid(const Model& m, const Grid& g, const std::vector<cplx>& psi) {
  const int n = int(psi.size()), w = stencil::w8;
  const auto d = derivative(psi, g.h);
  double s = 0;
  for (int i = w; i < n - w; ++i) s += std::norm(d[i]) + m.F(std::norm(psi[i]));
  return g.h * s;
}

// P = int (|psi|^2 - r0^2) d_x arg psi for a non-vanishing field
inline double momentum_field(const Model& m, const Grid& g, const std::vector<cplx>& psi) {
  const int n = int(psi.size()), w = stencil::w8;
  const auto d = derivative(psi, g.h);
  double s = 0;
  for (int i = w; i < n - w; ++i) {
    const double rho = std::norm(psi[i]);
    if (!(rho > 0)) throw Error("vanishing", "momentum needs a non-vanishing field");
    s += (rho - m.r02()) * (std::conj(psi[i]) * d[i]).imag() / rho;
  }
  return g.h * s;
}

struct UntwistedMomentum {
  double value = 0;    // in (-pi r0^2, pi r0^2]
  double at_08 = 0;    // same with R = 0.8 L
  double R_defect = 0;  // |value - at_08| on the circle
};

inline double reduce_momentum(double p, double r02) {
  const double per = 2 * std::numbers::pi * r02;
  double q = std::remainder(p, per);
  if (q <= -0.5 * per) q += per;
  return q;
}

// int_{-R}^{R} <i psi | psi'> - r0^2 (arg psi(R) - arg psi(-R)), modulo 2 pi r0^2
inline UntwistedMomentum untwisted_momentum(const Model& m, const Grid& g, const std::vector<cplx>& psi,
                                            double tol = 1e-4) {
  const int n = int(psi.size());
  const double r0 = m.r0(), r02 = m.r02();
  if (std::fabs(std::abs(psi.front()) - r0) > tol || std::fabs(std::abs(psi.back()) - r0) > tol)
    throw Error("boundary", "|psi| differs from r0 at the ends of the box");
  const auto d = derivative(psi, g.h);
  auto at = [&](double frac) {
    const double R = frac * g.L;
    int lo = 0, hi = n - 1;
    while (g.x(lo) < -R) ++lo;
    while (g.x(hi) > R) --hi;
    double s = 0;
    for (int i = lo; i <= hi; ++i) {
      const double v = (std::conj(psi[i]) * d[i]).imag();
      s += (i == lo || i == hi) ? 0.5 * v : v;
    }
    s *= g.h;
    s -= r02 * std::arg(psi[hi] / psi[lo]);
    return reduce_momentum(s, r02);
  };
  UntwistedMomentum r;
  r.value = at(0.9);
  r.at_08 = at(0.8);
  r.R_defect = std::fabs(reduce_momentum(r.value - r.at_08, r02));
  return r;
}

// L = E - c P + (M / 2)(P - P_ref)^2
inline double liapounov_L(const Model& m, const Grid& g, const std::vector<cplx>& psi, double c, double M,
                          double P_ref) {
  if (!(M > 0)) throw Error("config", "M must be positive");
  const double P = momentum_field(m, g, psi);
  return energy_grid(m, g, psi) - c * P + 0.5 * M * (P - P_ref) * (P - P_ref);
}

// K = E + 2 M r0^4 sin^2((P_untwisted - r0^2 pi) / (2 r0^2))
inline double functional_K(const Model& m, const Grid& g, const std::vector<cplx>& psi, double M) {
  if (!(M > 0)) throw Error("config", "M must be positive");
  const double r02 = m.r02();
  const double s = std::sin((untwisted_momentum(m, g, psi).value - r02 * std::numbers::pi) / (2 * r02));
  return energy_grid(m, g, psi) + 2 * M * r02 * r02 * s * s;
}

// 4 int_mu^r0 sqrt(F(s^2)) ds
inline double kink_lower_bound(const Model& m, double mu) {
  const double r0 = m.r0();
  if (mu >= r0) return 0.0;
  auto r = integrate([&](double s) { return std::sqrt(std::fmax(m.Fs((s - r0) * (s + r0)), 0.0)); },
                     std::fmax(mu, 0.0), r0, 1e-300, 1e-14);
  return 4 * r.value;
}

}  // namespace nlsw
