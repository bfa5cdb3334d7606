#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <queue>
#include <type_traits>
#include <vector>

namespace nlsw {

// Adaptive Gauss-Kronrod (G7/K15) with global error control.
// The integrand may return double or std::array<double, K>; the
// error test uses the largest component.

namespace detail {

inline constexpr std::array<double, 8> gk15_x = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};

inline constexpr std::array<double, 8> gk15_wk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};

inline constexpr std::array<double, 4> gk15_wg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

inline double qabs(double v) { return std::fabs(v); }
template <std::size_t K>
double qabs(const std::array<double, K>& v) {
  double m = 0;
  for (double x : v) m = std::fmax(m, std::fabs(x));
  return m;
}

inline void qaxpy(double& y, double a, double x) { y += a * x; }
template <std::size_t K>
void qaxpy(std::array<double, K>& y, double a, const std::array<double, K>& x) {
  for (std::size_t i = 0; i < K; ++i) y[i] += a * x[i];
}

inline double qsub(double a, double b) { return a - b; }
template <std::size_t K>
std::array<double, K> qsub(std::array<double, K> a, const std::array<double, K>& b) {
  for (std::size_t i = 0; i < K; ++i) a[i] -= b[i];
  return a;
}

template <class T>
T qzero() {
  if constexpr (std::is_same_v<T, double>) return 0.0;
  else { T z{}; return z; }
}

template <class T>
struct Panel {
  double a, b;
  T val;
  double err;
  bool operator<(const Panel& o) const { return err < o.err; }
};

template <class T, class Fn>
Panel<T> gk15(Fn& f, double a, double b) {
  const double m = 0.5 * (a + b), r = 0.5 * (b - a);
  T k = qzero<T>(), g = qzero<T>();
  T fc = f(m);
  qaxpy(k, gk15_wk[7], fc);
  qaxpy(g, gk15_wg[3], fc);
  for (int j = 0; j < 7; ++j) {
    T f1 = f(m - r * gk15_x[j]);
    T f2 = f(m + r * gk15_x[j]);
    qaxpy(k, gk15_wk[j], f1);
    qaxpy(k, gk15_wk[j], f2);
    if (j % 2 == 1) {
      qaxpy(g, gk15_wg[j / 2], f1);
      qaxpy(g, gk15_wg[j / 2], f2);
    }
  }
  T kr = qzero<T>(), gr = qzero<T>();
  qaxpy(kr, r, k);
  qaxpy(gr, r, g);
  return {a, b, kr, qabs(qsub(kr, gr))};
}

}  // namespace detail

template <class T>
struct QuadResult {
  T value;
  double error;
  bool converged;
};

// Integrates f over [a, b] until error <= max(abs_tol, rel_tol*|I|).
template <class Fn>
auto integrate(Fn f, double a, double b, double abs_tol = 1e-13, double rel_tol = 1e-13,
               int max_panels = 4000) {
  using T = std::decay_t<decltype(f(a))>;
  if (a == b) return QuadResult<T>{detail::qzero<T>(), 0.0, true};
  if (a > b) {
    auto r = integrate(f, b, a, abs_tol, rel_tol, max_panels);
    T neg = detail::qzero<T>();
    detail::qaxpy(neg, -1.0, r.value);
    return QuadResult<T>{neg, r.error, r.converged};
  }
  std::priority_queue<detail::Panel<T>> heap;
  auto p = detail::gk15<T>(f, a, b);
  T total = p.val;
  double err = p.err;
  heap.push(p);
  int n = 1;
  auto done = [&] { return err <= std::fmax(abs_tol, rel_tol * detail::qabs(total)); };
  while (!done() && n < max_panels) {
    auto w = heap.top();
    heap.pop();
    const double mid = 0.5 * (w.a + w.b);
    if (mid <= w.a || mid >= w.b) {
      heap.push(w);
      break;
    }
    auto l = detail::gk15<T>(f, w.a, mid);
    auto r = detail::gk15<T>(f, mid, w.b);
    detail::qaxpy(total, -1.0, w.val);
    detail::qaxpy(total, 1.0, l.val);
    detail::qaxpy(total, 1.0, r.val);
    err += l.err + r.err - w.err;
    heap.push(l);
    heap.push(r);
    n += 2;
  }
  // recompute sums to shed accumulated cancellation in the running totals
  T sum = detail::qzero<T>();
  double es = 0;
  while (!heap.empty()) {
    detail::qaxpy(sum, 1.0, heap.top().val);
    es += heap.top().err;
    heap.pop();
  }
  return QuadResult<T>{sum, es, es <= std::fmax(abs_tol, rel_tol * detail::qabs(sum))};
}

}  // namespace nlsw
