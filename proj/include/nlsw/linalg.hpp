#pragma once

#include <lapacke.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include "nlsw/error.hpp"

namespace nlsw {

using cplx = std::complex<double>;

// Row-major dense square matrix.
struct Dense {
  int n = 0;
  std::vector<double> a;
  Dense() = default;
  explicit Dense(int n_) : n(n_), a(std::size_t(n_) * n_, 0.0) {}
  double& operator()(int i, int j) { return a[std::size_t(i) * n + j]; }
  double operator()(int i, int j) const { return a[std::size_t(i) * n + j]; }

  std::vector<double> apply(const std::vector<double>& v) const {
    std::vector<double> r(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double* row = &a[std::size_t(i) * n];
      double s = 0;
      for (int j = 0; j < n; ++j) s += row[j] * v[j];
      r[i] = s;
    }
    return r;
  }
  std::vector<cplx> apply(const std::vector<cplx>& v) const {
    std::vector<cplx> r(n, 0.0);
    for (int i = 0; i < n; ++i) {
      const double* row = &a[std::size_t(i) * n];
      cplx s = 0;
      for (int j = 0; j < n; ++j) s += row[j] * v[j];
      r[i] = s;
    }
    return r;
  }
  double norm_inf() const {
    double m = 0;
    for (int i = 0; i < n; ++i) {
      double s = 0;
      for (int j = 0; j < n; ++j) s += std::fabs((*this)(i, j));
      m = std::fmax(m, s);
    }
    return m;
  }
  double asymmetry() const {
    double m = 0;
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < i; ++j) m = std::fmax(m, std::fabs((*this)(i, j) - (*this)(j, i)));
    return m;
  }
};

inline void lapack_check(lapack_int info, const char* what) {
  if (info != 0) throw Error("linalg", std::string(what) + " failed, info = " + std::to_string(info));
}

// Eigenvalues (ascending) of a symmetric matrix; vectors stored row-major in
// *vecs (column k is eigenvector k) when requested.
inline std::vector<double> sym_eig(Dense A, Dense* vecs = nullptr) {
  std::vector<double> w(A.n);
  const char job = vecs ? 'V' : 'N';
  lapack_check(LAPACKE_dsyevd(LAPACK_ROW_MAJOR, job, 'U', A.n, A.a.data(), A.n, w.data()), "dsyevd");
  if (vecs) *vecs = std::move(A);
  return w;
}

// Eigenvalues (ascending) of a symmetric band matrix with kd off-diagonals,
// entries from entry(i, j) for i >= j; vectors as in sym_eig when requested.
template <class Fn>
std::vector<double> sym_band_eig(int n, int kd, Fn entry, Dense* vecs = nullptr) {
  const int ld = kd + 1;
  std::vector<double> ab(std::size_t(ld) * n, 0.0), w(n);
  for (int j = 0; j < n; ++j)
    for (int i = j; i <= std::min(n - 1, j + kd); ++i) ab[std::size_t(j) * ld + (i - j)] = entry(i, j);
  if (vecs) {
    std::vector<double> z(std::size_t(n) * n);
    lapack_check(LAPACKE_dsbevd(LAPACK_COL_MAJOR, 'V', 'L', n, kd, ab.data(), ld, w.data(), z.data(), n),
                 "dsbevd");
    Dense T(n);
    for (int i = 0; i < n; ++i)
      for (int k = 0; k < n; ++k) T(i, k) = z[std::size_t(k) * n + i];
    *vecs = std::move(T);
  } else {
    lapack_check(LAPACKE_dsbevd(LAPACK_COL_MAJOR, 'N', 'L', n, kd, ab.data(), ld, w.data(), nullptr, 1),
                 "dsbevd");
  }
  return w;
}

inline std::vector<cplx> general_eigvals(Dense A) {
  std::vector<double> wr(A.n), wi(A.n);
  lapack_check(LAPACKE_dgeev(LAPACK_ROW_MAJOR, 'N', 'N', A.n, A.a.data(), A.n, wr.data(), wi.data(),
                             nullptr, A.n, nullptr, A.n),
               "dgeev");
  std::vector<cplx> w(A.n);
  for (int i = 0; i < A.n; ++i) w[i] = {wr[i], wi[i]};
  return w;
}

// Eigenvector for an eigenvalue estimate by shifted inverse iteration.
inline std::vector<cplx> inverse_iteration(const Dense& A, cplx lambda, int iters = 3) {
  const int n = A.n;
  std::vector<cplx> B(std::size_t(n) * n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) B[std::size_t(i) * n + j] = A(i, j);
  // nudge off the exact eigenvalue so the factorization stays regular
  const cplx shift = lambda + 1e-10 * std::fmax(1.0, std::abs(lambda));
  for (int i = 0; i < n; ++i) B[std::size_t(i) * n + i] -= shift;
  std::vector<lapack_int> piv(n);
  auto* Bp = reinterpret_cast<lapack_complex_double*>(B.data());
  lapack_check(LAPACKE_zgetrf(LAPACK_ROW_MAJOR, n, n, Bp, n, piv.data()), "zgetrf");
  std::vector<cplx> v(n);
  for (int i = 0; i < n; ++i) v[i] = 1.0 + 0.01 * ((i * 7919) % 101);
  for (int it = 0; it < iters; ++it) {
    lapack_check(LAPACKE_zgetrs(LAPACK_ROW_MAJOR, 'N', n, 1, Bp, n, piv.data(),
                                reinterpret_cast<lapack_complex_double*>(v.data()), 1),
                 "zgetrs");
    double s = 0;
    for (auto& z : v) s += std::norm(z);
    s = std::sqrt(s);
    for (auto& z : v) z /= s;
  }
  return v;
}

// Complex banded LU (kl sub- and ku super-diagonals), factored once.
class BandedLU {
 public:
  BandedLU() = default;
  // band(i, j) for |i - j| within the band, from a callback
  template <class Fn>
  BandedLU(int n, int kl, int ku, Fn entry) : n_(n), kl_(kl), ku_(ku), ldab_(2 * kl + ku + 1) {
    ab_.assign(std::size_t(ldab_) * n, 0.0);
    for (int j = 0; j < n; ++j)
      for (int i = std::max(0, j - ku); i <= std::min(n - 1, j + kl); ++i)
        ab_[std::size_t(j) * ldab_ + kl + ku + i - j] = entry(i, j);
    piv_.resize(n);
    lapack_check(LAPACKE_zgbtrf(LAPACK_COL_MAJOR, n, n, kl, ku,
                                reinterpret_cast<lapack_complex_double*>(ab_.data()), ldab_, piv_.data()),
                 "zgbtrf");
  }
  void solve(std::vector<cplx>& b) const {
    lapack_check(LAPACKE_zgbtrs(LAPACK_COL_MAJOR, 'N', n_, kl_, ku_, 1,
                                reinterpret_cast<const lapack_complex_double*>(ab_.data()), ldab_,
                                piv_.data(), reinterpret_cast<lapack_complex_double*>(b.data()), n_),
                 "zgbtrs");
  }

 private:
  int n_ = 0, kl_ = 0, ku_ = 0, ldab_ = 0;
  std::vector<cplx> ab_;
  std::vector<lapack_int> piv_;
};

}  // namespace nlsw
