#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <optional>
#include <vector>

#include "nlsw/linalg.hpp"
#include "nlsw/profile.hpp"

namespace nlsw {

// Centred stencils truncated at the ends (zero data outside the box), so D
// stays exactly skew and D2 exactly symmetric. D is fourth order by default;
// D2 is eighth order, which keeps the translation zero mode of Mdag within
// 1e-8 of zero on the grids we use.
namespace stencil {
inline constexpr int w4 = 2, w8 = 4;
inline constexpr double d1_4[w4 + 1] = {0.0, 8.0 / 12, -1.0 / 12};
inline constexpr double d1_8[w8 + 1] = {0.0, 4.0 / 5, -1.0 / 5, 4.0 / 105, -1.0 / 280};
inline constexpr double d2_8[w8 + 1] = {-205.0 / 72, 8.0 / 5, -1.0 / 5, 8.0 / 315, -1.0 / 560};

struct First {
  int w;
  const double* c;
  double h;
  explicit First(double h_, int order = 4)
      : w(order == 8 ? w8 : w4), c(order == 8 ? d1_8 : d1_4), h(h_) {}
  // D(i, j)
  double operator()(int i, int j) const {
    const int k = j - i;
    if (k == 0 || std::abs(k) > w) return 0.0;
    return (k > 0 ? c[k] : -c[-k]) / h;
  }
  template <class V>
  V apply(const V& v) const {
    const int n = int(v.size());
    V r(n);
    for (int i = 0; i < n; ++i) {
      typename V::value_type s{};
      for (int k = 1; k <= w; ++k) {
        if (i + k < n) s += c[k] * v[i + k];
        if (i - k >= 0) s -= c[k] * v[i - k];
      }
      r[i] = s / h;
    }
    return r;
  }
};

struct Second {
  static constexpr int w = w8;
  double h;
  explicit Second(double h_) : h(h_) {}
  double operator()(int i, int j) const {
    const int k = std::abs(j - i);
    return k > w ? 0.0 : d2_8[k] / (h * h);
  }
  template <class V>
  V apply(const V& v) const {
    const int n = int(v.size());
    V r(n);
    for (int i = 0; i < n; ++i) {
      typename V::value_type s = d2_8[0] * v[i];
      for (int k = 1; k <= w; ++k) {
        if (i + k < n) s += d2_8[k] * v[i + k];
        if (i - k >= 0) s += d2_8[k] * v[i - k];
      }
      r[i] = s / (h * h);
    }
    return r;
  }
};
}  // namespace stencil

// Linearization about (eta, u) in hydrodynamical variables (zeta, upsilon):
//   M    = -f'(rho) - (1 / (2 sqrt rho)) d_xx (. / sqrt rho) + (sqrt rho)'' / (2 rho^(3/2))
//   Mdag = M - (c - 2u)^2 / (2 rho)
//   L    = [[M, 2u - c], [2u - c, 2 rho]],  J = -D [[0, 1], [1, 0]]
// Stored as coefficients; dense matrices are assembled on request.
struct LinearizedOperators {
  Grid grid;
  double c = 0, r02 = 1, cs = 0;
  std::vector<double> x, eta, u, deta;
  std::vector<double> s;     // 1 / sqrt rho
  std::vector<double> pot;   // diagonal part of M
  std::vector<double> beta;  // 2u - c
  std::vector<double> r2;    // 2 rho
  int d_order = 4;           // order of D inside J

  int N() const { return grid.N; }
  static constexpr int band = stencil::w8;

  double M_entry(int i, int j) const {
    double v = -0.5 * s[i] * stencil::Second(grid.h)(i, j) * s[j];
    if (i == j) v += pot[i];
    return v;
  }
  double Mdag_entry(int i, int j) const {
    double v = M_entry(i, j);
    if (i == j) v -= beta[i] * beta[i] / r2[i];
    return v;
  }

  Dense M() const { return dense_band([&](int i, int j) { return M_entry(i, j); }); }
  Dense Mdag() const { return dense_band([&](int i, int j) { return Mdag_entry(i, j); }); }
  Dense L() const {
    const int n = N();
    Dense A(2 * n);
    for (int i = 0; i < n; ++i) {
      for (int j = std::max(0, i - band); j <= std::min(n - 1, i + band); ++j) A(i, j) = M_entry(i, j);
      A(i, n + i) = A(n + i, i) = beta[i];
      A(n + i, n + i) = r2[i];
    }
    return A;
  }

  // (J L)(r, q) in the stacked ordering (zeta_0..zeta_{n-1}, upsilon_0..)
  double JL_entry(int r, int q) const {
    const int n = N();
    const int i = r % n, j = q % n;
    const bool up = r >= n, vc = q >= n;
    const stencil::First D(grid.h, d_order);
    if (!up) return -D(i, j) * (vc ? r2[j] : beta[j]);
    if (vc) return -D(i, j) * beta[j];
    double acc = 0;
    for (int k = std::max(0, i - D.w); k <= std::min(n - 1, i + D.w); ++k)
      if (std::abs(k - j) <= band) acc -= D(i, k) * M_entry(k, j);
    return acc;
  }
  int JL_halfwidth() const { return stencil::First(grid.h, d_order).w + band; }

  Dense JL() const {
    const int n = N(), w = JL_halfwidth();
    Dense A(2 * n);
    for (int r = 0; r < 2 * n; ++r)
      for (int blk = 0; blk < 2; ++blk)
        for (int j = std::max(0, r % n - w); j <= std::min(n - 1, r % n + w); ++j)
          A(r, blk * n + j) = JL_entry(r, blk * n + j);
    return A;
  }

  template <class V>
  V apply_JL(const V& zu) const {
    const int n = N();
    V a(n), b(n);
    const stencil::Second D2(grid.h);
    V z(zu.begin(), zu.begin() + n), y(zu.begin() + n, zu.end());
    V q(n);
    for (int i = 0; i < n; ++i) q[i] = s[i] * z[i];
    q = D2.apply(q);
    for (int i = 0; i < n; ++i) {
      a[i] = -0.5 * s[i] * q[i] + pot[i] * z[i] + beta[i] * y[i];  // (L v) upper
      b[i] = beta[i] * z[i] + r2[i] * y[i];                        // (L v) lower
    }
    const stencil::First D(grid.h, d_order);
    a = D.apply(a);
    b = D.apply(b);
    V r(2 * n);
    for (int i = 0; i < n; ++i) {
      r[i] = -b[i];
      r[n + i] = -a[i];
    }
    return r;
  }

 private:
  template <class Fn>
  Dense dense_band(Fn e) const {
    const int n = N();
    Dense A(n);
    for (int i = 0; i < n; ++i)
      for (int j = std::max(0, i - band); j <= std::min(n - 1, i + band); ++j) A(i, j) = e(i, j);
    return A;
  }
};

// Uniform state U = r0 at speed c, for checks against constant coefficients.
inline WaveProfile constant_profile(const Model& m, double c, const Grid& g) {
  WaveProfile P;
  P.c = c;
  P.xi_c = 0;
  P.r02 = m.r02();
  P.status = Existence::no_wave;
  P.grid = g;
  P.x = g.points();
  const std::size_t n = P.x.size();
  P.eta.assign(n, 0.0);
  P.u.assign(n, 0.0);
  P.phi.assign(n, 0.0);
  P.deta.assign(n, 0.0);
  P.A.assign(n, m.r0());
  return P;
}

inline LinearizedOperators build_operators(const Model& m, const WaveProfile& P, int min_N = 512) {
  if (P.kink()) throw Error("kink", "the hydrodynamical operators need a non-vanishing profile");
  const int n = P.grid.N;
  if (n < min_N) throw Error("config", "spectrum needs N >= " + std::to_string(min_N));
  for (double e : P.eta)
    if (!(m.r02() + e > 0)) throw Error("kink", "profile vanishes; hydrodynamical form invalid");
  LinearizedOperators O;
  O.grid = P.grid;
  O.c = P.c;
  O.r02 = m.r02();
  O.cs = m.cs();
  O.x = P.x;
  O.eta = P.eta;
  O.u = P.u;
  O.deta = P.deta;
  O.s.resize(n);
  O.pot.resize(n);
  O.beta.resize(n);
  O.r2.resize(n);
  const Potential V(m, P.c);
  const bool flat = P.xi_c == 0;
  for (int i = 0; i < n; ++i) {
    const double rho = O.r02 + P.eta[i];
    O.s[i] = 1 / std::sqrt(rho);
    // (sqrt rho)'' / (2 rho^(3/2)) from eta'' = -V'/2, eta'^2 = -V
    const double q = flat ? 0.0 : -V.Vp(P.eta[i]) / (8 * rho * rho) + V.V(P.eta[i]) / (8 * rho * rho * rho);
    O.pot[i] = -m.fps(P.eta[i]) + q;
    O.beta[i] = 2 * P.u[i] - P.c;
    O.r2[i] = 2 * rho;
  }
  return O;
}

inline LinearizedOperators build_operators(const Model& m, double c, int N, std::optional<double> L = {}) {
  ProfileOptions o;
  o.N = N;
  o.L = L;
  return build_operators(m, solve_profile(m, c, o));
}

// fraction of |v|^2 carried by |x| <= frac L (v may stack several fields)
template <class T>
double central_mass(const std::vector<double>& x, double L, const std::vector<T>& v, double frac = 0.8) {
  const std::size_t n = x.size();
  double in = 0, all = 0;
  for (std::size_t k = 0; k < v.size(); ++k) {
    const double a = std::norm(std::complex<double>(v[k]));
    all += a;
    if (std::fabs(x[k % n]) <= frac * L) in += a;
  }
  return all > 0 ? in / all : 0.0;
}

inline std::vector<double> Mdag_eigenvalues(const LinearizedOperators& O, Dense* vecs = nullptr) {
  return sym_band_eig(O.N(), O.band, [&](int i, int j) { return O.Mdag_entry(i, j); }, vecs);
}

struct NegativeCounts {
  int n_neg_L = 0;
  int n_neg_Mdag = 0;
  double lowest_Mdag = 0, second_Mdag = 0;
};

// Eigenvalues below -tol. The lower block of L is 2 rho > 0, so by the
// Haynsworth inertia formula L + tol has as many negative eigenvalues as the
// banded Schur complement M + tol - (2u - c)^2 / (2 rho + tol). dense = true
// diagonalizes L itself instead.
inline NegativeCounts count_negative(const LinearizedOperators& O, double tol = 1e-8, bool dense = false) {
  NegativeCounts r;
  const auto wm = Mdag_eigenvalues(O);
  for (double w : wm) r.n_neg_Mdag += w < -tol;
  r.lowest_Mdag = wm[0];
  r.second_Mdag = wm.size() > 1 ? wm[1] : NAN;
  if (dense) {
    for (double w : sym_eig(O.L())) r.n_neg_L += w < -tol;
    return r;
  }
  auto schur = [&](int i, int j) {
    double v = O.M_entry(i, j);
    if (i == j) v += tol - O.beta[i] * O.beta[i] / (O.r2[i] + tol);
    return v;
  };
  for (double w : sym_band_eig(O.N(), O.band, schur)) r.n_neg_L += w < 0;
  return r;
}

// Lowest eigenvalue of Mdag whose eigenvector is not localized.
inline double continuum_edge(const LinearizedOperators& O) {
  Dense vec;
  const auto w = Mdag_eigenvalues(O, &vec);
  const int n = O.N();
  std::vector<double> v(n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) v[i] = vec(i, k);
    if (central_mass(O.x, O.grid.L, v) < 0.99) return w[k];
  }
  return NAN;
}

struct EigenCandidate {
  cplx lambda;
  double residual = 0;
  double mass = 0;
  double translation = 0;  // |cos| of the angle to d_x (eta, u)
  bool translation_artifact = false;
  bool accepted = false;
};

struct UnstableEigen {
  double gamma0 = 0;
  double imag = 0;
  std::vector<double> zeta, upsilon;  // h sum (zeta^2 + upsilon^2) = 1
  double residual = 0;
};

struct SpectrumReport {
  std::optional<UnstableEigen> unstable;
  std::vector<EigenCandidate> candidates;  // all eigenvalues above threshold
  double max_real = 0;                     // over the whole computed spectrum
  double threshold = 0;
  double symmetry_defect = 0;
  double zero_mode = 0;  // second eigenvalue of Mdag
  std::vector<cplx> eigenvalues;
};

// max over eigenvalues of the distance from -lambda and from conj(lambda) to
// the spectrum, relative to the spectral radius
inline double hamiltonian_symmetry_defect(const std::vector<cplx>& w) {
  double rad = 0;
  for (auto z : w) rad = std::fmax(rad, std::abs(z));
  std::vector<cplx> s = w;
  auto key = [](cplx a, cplx b) { return a.real() < b.real(); };
  std::sort(s.begin(), s.end(), key);
  auto nearest = [&](cplx z) {
    auto it = std::lower_bound(s.begin(), s.end(), z, key);
    double best = INFINITY;
    for (auto j = it; j != s.end() && j->real() - z.real() < best; ++j) best = std::fmin(best, std::abs(*j - z));
    for (auto j = it; j != s.begin();) {
      --j;
      if (z.real() - j->real() >= best) break;
      best = std::fmin(best, std::abs(*j - z));
    }
    return best;
  };
  double d = 0;
  for (auto z : w) d = std::fmax(d, std::fmax(nearest(-z), nearest(std::conj(z))));
  return rad > 0 ? d / rad : 0.0;
}

namespace detail {

inline std::vector<double> translation_generator(const LinearizedOperators& O) {
  const int n = O.N();
  std::vector<double> tr(2 * n);
  for (int i = 0; i < n; ++i) {
    const double rho = O.r02 + O.eta[i];
    tr[i] = O.deta[i];
    tr[n + i] = O.c * O.r02 * O.deta[i] / (2 * rho * rho);  // u' for u = c eta / (2 rho)
  }
  return tr;
}

inline UnstableEigen real_mode(const LinearizedOperators& O, const std::vector<cplx>& v, cplx lambda,
                               double residual) {
  const int n = O.N();
  std::size_t imax = 0;
  for (std::size_t i = 1; i < v.size(); ++i)
    if (std::abs(v[i]) > std::abs(v[imax])) imax = i;
  const cplx ph = std::conj(v[imax]) / std::abs(v[imax]);
  UnstableEigen U;
  U.gamma0 = lambda.real();
  U.imag = lambda.imag();
  U.residual = residual;
  U.zeta.resize(n);
  U.upsilon.resize(n);
  double nrm = 0;
  for (int i = 0; i < n; ++i) {
    U.zeta[i] = (v[i] * ph).real();
    U.upsilon[i] = (v[n + i] * ph).real();
    nrm += U.zeta[i] * U.zeta[i] + U.upsilon[i] * U.upsilon[i];
  }
  nrm = std::sqrt(O.grid.h * nrm);
  // sign: zeta positive where it is largest in magnitude
  int jm = 0;
  for (int i = 1; i < n; ++i)
    if (std::fabs(U.zeta[i]) > std::fabs(U.zeta[jm])) jm = i;
  if (U.zeta[jm] < 0) nrm = -nrm;
  for (int i = 0; i < n; ++i) {
    U.zeta[i] /= nrm;
    U.upsilon[i] /= nrm;
  }
  return U;
}

}  // namespace detail

// Dense eigensolve of J L. Candidates with Re > 1e-6 cs / r0 get an
// eigenvector by inverse iteration and are kept if localized (mass >=
// mass_min in |x| <= 0.8 L) with relative residual <= res_max.
inline SpectrumReport unstable_eigen(const LinearizedOperators& O, double mass_min = 0.99,
                                     double res_max = 1e-8, bool strict = true) {
  const int n = O.N();
  const Dense A = O.JL();
  SpectrumReport R;
  R.threshold = 1e-6 * O.cs / std::sqrt(O.r02);
  R.eigenvalues = general_eigvals(A);
  R.symmetry_defect = hamiltonian_symmetry_defect(R.eigenvalues);
  R.max_real = -INFINITY;
  for (auto z : R.eigenvalues) R.max_real = std::fmax(R.max_real, z.real());
  const double anorm = A.norm_inf();
  const auto tr = detail::translation_generator(O);
  double tn = 0;
  for (double t : tr) tn += t * t;
  tn = std::sqrt(tn);
  std::vector<std::vector<cplx>> vecs;
  for (auto z : R.eigenvalues) {
    if (!(z.real() > R.threshold) || z.imag() < 0) continue;
    EigenCandidate e;
    e.lambda = z;
    auto v = inverse_iteration(A, z);
    auto Av = A.apply(v);
    double num = 0, den = 0;
    cplx ip = 0;
    for (int i = 0; i < 2 * n; ++i) {
      num += std::norm(Av[i] - z * v[i]);
      den += std::norm(v[i]);
      ip += tr[i] * v[i];
    }
    e.residual = std::sqrt(num / den) / anorm;
    e.mass = central_mass(O.x, O.grid.L, v);
    e.translation = tn > 0 ? std::abs(ip) / (tn * std::sqrt(den)) : 0.0;
    e.accepted = e.mass >= mass_min && e.residual <= res_max;
    R.candidates.push_back(e);
    vecs.push_back(std::move(v));
  }
  // If the discrete translation eigenvalue of Mdag (exactly 0 in the
  // continuum) has slipped below zero, L gains a negative direction and the
  // Jordan pair at 0 may split into a real pair. Drop that one candidate.
  const auto wm = Mdag_eigenvalues(O);
  R.zero_mode = wm.size() > 1 ? wm[1] : NAN;
  if (R.zero_mode < 0) {
    EigenCandidate* t = nullptr;
    for (auto& e : R.candidates)
      if (e.accepted && (!t || e.translation > t->translation)) t = &e;
    if (t && t->translation > 0.9999) {
      t->accepted = false;
      t->translation_artifact = true;
    }
  }
  int acc = 0;
  for (auto& e : R.candidates) acc += e.accepted;
  if (acc > 1 && !strict) return R;
  if (acc > 1) throw Error("grid_refinement", "more than one localized unstable eigenvalue; refine the grid");
  if (acc == 0) return R;
  const auto it = std::find_if(R.candidates.begin(), R.candidates.end(),
                               [](const EigenCandidate& c) { return c.accepted; });
  R.unstable = detail::real_mode(O, vecs[it - R.candidates.begin()], it->lambda, it->residual);
  return R;
}

// Shift-invert refinement of an eigenpair of J L near lambda0 on the grid of
// O (which may be far larger than a dense solve allows). The system is
// banded once zeta and upsilon are interleaved.
inline UnstableEigen refine_eigen(const LinearizedOperators& O, double lambda0, int iters = 6) {
  const int n = O.N(), w = O.JL_halfwidth();
  const int bw = 2 * w + 1;
  auto stacked = [n](int k) { return (k % 2) * n + k / 2; };
  const double shift = lambda0 * (1 + 1e-9);
  BandedLU lu(2 * n, bw, bw, [&](int r, int q) {
    double v = O.JL_entry(stacked(r), stacked(q));
    if (r == q) v -= shift;
    return cplx(v);
  });
  std::vector<cplx> v(2 * n);
  for (int k = 0; k < 2 * n; ++k) v[k] = 1.0 + 0.01 * ((k * 7919) % 101);
  for (int it = 0; it < iters; ++it) {
    lu.solve(v);
    double s = 0;
    for (auto& z : v) s += std::norm(z);
    s = std::sqrt(s);
    for (auto& z : v) z /= s;
  }
  std::vector<cplx> vs(2 * n);
  for (int k = 0; k < 2 * n; ++k) vs[stacked(k)] = v[k];
  // Rayleigh-type estimate and residual
  const auto Av = O.apply_JL(vs);
  cplx num = 0;
  double den = 0;
  for (int i = 0; i < 2 * n; ++i) {
    num += std::conj(vs[i]) * Av[i];
    den += std::norm(vs[i]);
  }
  const cplx lam = num / den;
  double res = 0, anorm = 0;
  for (int i = 0; i < 2 * n; ++i) res += std::norm(Av[i] - lam * vs[i]);
  for (int r = 0; r < 2 * n; ++r) {
    double srow = 0;
    for (int blk = 0; blk < 2; ++blk)
      for (int j = std::max(0, r % n - w); j <= std::min(n - 1, r % n + w); ++j)
        srow += std::fabs(O.JL_entry(r, blk * n + j));
    anorm = std::fmax(anorm, srow);
  }
  return detail::real_mode(O, vs, lam, std::sqrt(res / den) / anorm);
}

// NLS perturbation w = U (zeta / (2 rho) + i int_{-inf}^x upsilon), normalized
// to unit grid L2 norm. zeta perturbs eta = rho - r0^2, so the modulus moves
// by zeta / (2 A).
inline std::vector<cplx> to_nls_mode(const WaveProfile& P, const std::vector<double>& zeta,
                                     const std::vector<double>& upsilon, double mean_tol = 1e-6) {
  const std::size_t n = P.x.size();
  if (zeta.size() != n || upsilon.size() != n) throw Error("config", "mode size differs from profile grid");
  const double h = P.grid.h;
  std::vector<double> Y(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) Y[i] = Y[i - 1] + 0.5 * h * (upsilon[i - 1] + upsilon[i]);
  double scale = 0;
  for (std::size_t i = 0; i < n; ++i) scale += h * (zeta[i] * zeta[i] + upsilon[i] * upsilon[i]);
  scale = std::sqrt(scale);
  if (scale > 0 && std::fabs(Y[n - 1]) > mean_tol * scale)
  {
    char buf[96];
    std::snprintf(buf, sizeof buf, "int upsilon dx = %.3e is not zero; enlarge the box", Y[n - 1]);
    throw Error("mode_mean", buf);
  }
  const auto U = P.sample_complex();
  std::vector<cplx> w(n);
  double nrm = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double rho = P.r02 + P.eta[i];
    w[i] = U[i] * cplx(zeta[i] / (2 * rho), Y[i]);
    nrm += h * std::norm(w[i]);
  }
  if (nrm == 0) return w;
  nrm = std::sqrt(nrm);
  for (auto& z : w) z /= nrm;
  return w;
}

}  // namespace nlsw
