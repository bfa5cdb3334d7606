#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "nlsw/nonlinearity.hpp"

namespace nlsw {

// V_c(xi) = c^2 xi^2 - 4 (r0^2 + xi) F(r0^2 + xi), and its reduced form
// W = V / xi^2, which is smooth with W(0) = c^2 - cs^2. Roots of V away
// from the double root at 0 are the roots of W.
class Potential {
 public:
  Potential(const Model& m, double c) : m_(&m), c_(c) {
    if (!(c >= 0)) throw Error("domain", "speed must be nonnegative");
    // W = sum w_j xi^j; the constant term is formed as c^2 - cs^2 so that
    // it vanishes exactly at the sonic speed.
    const int n = m.is_polynomial() ? int(m.poly().size()) : 16;
    auto b = m.taylor_f(n + 1);
    const double r02 = m.r02();
    w_.assign(n + 1, 0.0);
    for (int j = 1; j <= n; ++j) w_[j] = 4 * r02 * b[j + 1] / (j + 2) + 4 * b[j] / (j + 1);
    w_[0] = c * c - m.cs() * m.cs();
    series_radius_ = m.taylor_radius();
  }

  const Model& model() const { return *m_; }
  double c() const { return c_; }

  double V(double xi) const {
    check(xi);
    return xi * xi * W(xi);
  }

  double Vp(double xi) const {
    check(xi);
    const double r02 = m_->r02();
    return 2 * c_ * c_ * xi - 4 * m_->Fs(xi) + 4 * (r02 + xi) * m_->fs(xi);
  }

  double W(double xi) const {
    check(xi);
    if (xi + m_->r02() <= 0) return c_ * c_;  // F(0) is multiplied by zero density
    if (std::fabs(xi) <= series_radius_) {
      double acc = 0;
      for (std::size_t j = w_.size(); j-- > 0;) acc = acc * xi + w_[j];
      return acc;
    }
    return c_ * c_ - 4 * (m_->r02() + xi) * m_->Fs(xi) / (xi * xi);
  }

  // dW/dxi away from 0
  double Wp(double xi) const { return (Vp(xi) - 2 * xi * W(xi)) / (xi * xi); }

 private:
  void check(double xi) const {
    if (xi < -m_->r02() * (1 + 1e-15)) throw Error("domain", "xi below -r0^2");
  }
  const Model* m_;
  double c_;
  std::vector<double> w_;
  double series_radius_ = 0;
};

enum class Existence { no_wave, dark_with_xi, bubble_above, kink, sonic };

inline const char* existence_name(Existence e) {
  switch (e) {
    case Existence::no_wave: return "no_wave";
    case Existence::dark_with_xi: return "dark_with_xi";
    case Existence::bubble_above: return "bubble_above";
    case Existence::kink: return "kink";
    case Existence::sonic: return "sonic";
  }
  return "?";
}

struct Verdict {
  Existence status = Existence::no_wave;
  std::optional<double> xi_c;
  bool further_roots = false;
  std::string diagnostic;
};

struct ScanOptions {
  double upper = 8.0;      // bubble scan bound, in units of r0^2
  double step = 1.0 / 512;  // in units of r0^2
};

namespace detail {

// First root of W walking from 0 in direction dir, with W < 0 before it.
inline std::optional<double> scan_side(const Potential& P, double dir, double lim, double step,
                                       bool sonic) {
  double prev = 0;
  double wprev = sonic ? -1.0 : P.W(0);
  if (wprev >= 0) return std::nullopt;
  const int n = int(std::ceil(lim / step - 1e-9));
  for (int k = 1; k <= n; ++k) {
    double xi = dir * std::fmin(k * step, lim);
    const double w = P.W(xi);
    if (sonic && k == 1 && w >= 0) return std::nullopt;
    if (w >= 0) {
      if (w == 0) return xi;
      double lo = prev, hi = xi;
      for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        if (mid == lo || mid == hi) break;
        if (P.W(mid) < 0) lo = mid;
        else hi = mid;
      }
      return hi;
    }
    prev = xi;
    wprev = w;
  }
  return std::nullopt;
}

}  // namespace detail

inline Verdict find_xi_c(const Model& m, double c, const ScanOptions& opt = {}) {
  if (!(c >= 0)) throw Error("domain", "speed must be nonnegative");
  Verdict v;
  const double cs = m.cs();
  const bool sonic = std::fabs(c - cs) <= 1e-12 * cs;
  if (!sonic && c > cs) {
    v.diagnostic = "speed above the speed of sound";
    return v;
  }
  if (sonic) c = cs;
  const Potential P(m, c);
  const double r02 = m.r02();
  auto neg = detail::scan_side(P, -1.0, r02, opt.step * r02, sonic);
  auto pos = detail::scan_side(P, 1.0, opt.upper * r02, opt.step * r02, sonic);
  if (!neg && !pos) {
    v.diagnostic = "no sign change of V_c";
    return v;
  }
  double xi;
  if (neg && pos) {
    xi = (-*neg <= *pos) ? *neg : *pos;
    v.further_roots = true;
  } else {
    xi = neg ? *neg : *pos;
  }
  const bool at_bottom = xi + r02 <= (c == 0 ? 1e-12 * r02 : 0.0);
  if (at_bottom) xi = -r02;
  if (!(at_bottom && c == 0)) {
    const double vp = P.Vp(xi);
    const double scale = std::fmax(1.0, cs * cs * r02);
    if (!(std::fabs(vp) > 1e-10 * scale)) {
      v.diagnostic = "double root of V_c at xi_c";
      return v;
    }
  }
  v.xi_c = xi;
  if (sonic) v.status = Existence::sonic;
  else if (at_bottom && c == 0) v.status = Existence::kink;
  else if (xi < 0) v.status = Existence::dark_with_xi;
  else v.status = Existence::bubble_above;
  return v;
}

// |xi_c - (-r0^2 + c^2 r0^4 / (4 F(0)))| for small c on a kink-bearing model
inline double xi_c_expansion_check(const Model& m, double c) {
  auto v0 = find_xi_c(m, 0.0);
  if (v0.status != Existence::kink) throw Error("no_kink", "model has no kink at c = 0");
  if (c == 0) return 0.0;
  auto v = find_xi_c(m, c);
  if (!v.xi_c) throw Error("no_wave", "no wave at this speed");
  const double r02 = m.r02();
  const double pred = -r02 + c * c * r02 * r02 / (4 * m.F(0.0));
  return std::fabs(*v.xi_c - pred);
}

}  // namespace nlsw
