#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "nlsw/error.hpp"
#include "nlsw/quadrature.hpp"

namespace nlsw {

enum class Kind { polynomial, gross_pitaevskii, saturated_exponential, saturated_rational, tanh_profile };

inline const char* kind_name(Kind k) {
  switch (k) {
    case Kind::polynomial: return "polynomial";
    case Kind::gross_pitaevskii: return "gross_pitaevskii";
    case Kind::saturated_exponential: return "saturated_exponential";
    case Kind::saturated_rational: return "saturated_rational";
    case Kind::tanh_profile: return "tanh_profile";
  }
  return "?";
}

inline Kind kind_from_name(const std::string& s) {
  for (Kind k : {Kind::polynomial, Kind::gross_pitaevskii, Kind::saturated_exponential,
                 Kind::saturated_rational, Kind::tanh_profile})
    if (s == kind_name(k)) return k;
  throw Error("config", "unknown nonlinearity kind '" + s + "'");
}

// What a config supplies. r0 may be absent for tanh_profile, where it is
// fixed by the other parameters.
struct ModelSpec {
  Kind kind = Kind::gross_pitaevskii;
  std::optional<double> r0;
  std::vector<double> coeffs;  // a_1..a_d, f = sum a_j (rho - r0^2)^j
  std::map<std::string, double> params;
  bool operator==(const ModelSpec&) const = default;
};

// Immutable nonlinearity. Everything is evaluated in the shifted variable
// xi = rho - r0^2 internally so that cancellation near r0^2 never bites.
class Model {
 public:
  explicit Model(const ModelSpec& spec) : spec_(spec) { build(); }

  const ModelSpec& spec() const { return spec_; }
  Kind kind() const { return spec_.kind; }
  double r0() const { return r0_; }
  double r02() const { return r02_; }
  double cs() const { return cs_; }
  std::optional<int> m_index() const { return m_; }
  double lambda_m() const { return lambda_; }
  bool is_polynomial() const {
    return spec_.kind == Kind::polynomial || spec_.kind == Kind::gross_pitaevskii;
  }
  // a_1..a_d (GP included as a_1 = -1)
  const std::vector<double>& poly() const { return a_; }

  double f(double rho) const { return fs(shift(rho)); }
  double fp(double rho) const { return fps(shift(rho)); }
  double F(double rho) const { return Fs(shift(rho)); }

  // f(r0^2 + xi), generic in the scalar type so that Taylor coefficients can
  // be read off a Cauchy integral.
  template <class T>
  T fs(T xi) const {
    using std::exp, std::expm1, std::log1p, std::tanh;
    switch (spec_.kind) {
      case Kind::polynomial:
      case Kind::gross_pitaevskii: {
        T acc = T(0);
        for (std::size_t j = a_.size(); j-- > 0;) acc = (acc + a_[j]) * xi;
        return acc;
      }
      case Kind::saturated_exponential:
        return expm1_any(-xi / rho0_);
      case Kind::saturated_rational:
        // -(rho0/2) (s0^-nu - (1 + rho/rho0)^-nu), s0 = 1 + r0^2/rho0
        return 0.5 * rho0_ * std::pow(s0_, -nu_) * expm1_any(-nu_ * log1p_any(xi / (rho0_ + r02_)));
      case Kind::tanh_profile: {
        // 1 + g tanh(q0 + d) with tanh q0 = -1/g, written without cancellation
        const T d = (2.0 * r02_ * xi + xi * xi) / (sigma_ * sigma_);
        const T td = tanh(d);
        return -alpha_ * (r02_ + xi) * td * (gamma_ - 1.0 / gamma_) / (1.0 - td / gamma_);
      }
    }
    return T(0);
  }

  double fps(double xi) const {
    switch (spec_.kind) {
      case Kind::polynomial:
      case Kind::gross_pitaevskii: {
        double acc = 0;
        for (std::size_t j = a_.size(); j-- > 1;) acc = (acc + (j + 1) * a_[j]) * xi;
        return acc + a_[0];
      }
      case Kind::saturated_exponential:
        return -std::exp(-xi / rho0_) / rho0_;
      case Kind::saturated_rational:
        return -0.5 * nu_ * std::pow(1.0 + (r02_ + xi) / rho0_, -nu_ - 1.0);
      case Kind::tanh_profile: {
        const double rho = r02_ + xi;
        const double q = (rho * rho - rho0_ * rho0_) / (sigma_ * sigma_);
        const double t = std::tanh(q);
        return -alpha_ * (1.0 + gamma_ * t) - alpha_ * rho * gamma_ * (1.0 - t * t) * 2.0 * rho / (sigma_ * sigma_);
      }
    }
    return 0;
  }

  // F(r0^2 + xi) = -int_0^xi f(r0^2 + s) ds
  double Fs(double xi) const {
    if (xi < -r02_) throw Error("domain", "F evaluated at negative density");
    if (is_polynomial()) return Fs_poly(xi);
    if (xi == 0) return 0;
    if (spec_.kind == Kind::saturated_exponential) return rho0_ * exp_tail(-xi / rho0_);
    if (spec_.kind == Kind::saturated_rational) {
      const double B = rho0_ + r02_;
      return -0.5 * rho0_ * std::pow(s0_, -nu_) * B * power_tail(xi / B);
    }
    auto r = integrate([this](double s) { return fs(s); }, 0.0, xi, 1e-300, 1e-15);
    return -r.value;
  }

  // int_a^b f(rho) d rho, accurate for short intervals anywhere
  double int_f(double a, double b) const {
    auto r = integrate([this](double rho) { return f(rho); }, a, b, 1e-300, 1e-15);
    return r.value;
  }

  // Taylor coefficients b_0..b_n of f(r0^2 + xi) at xi = 0 (b_0 = 0); exact
  // for polynomials, from a Cauchy integral on a small circle otherwise.
  std::vector<double> taylor_f(int n) const {
    std::vector<double> b(n + 1, 0.0);
    if (is_polynomial()) {
      for (std::size_t j = 0; j < a_.size() && int(j) + 1 <= n; ++j) b[j + 1] = a_[j];
      return b;
    }
    const int M = 128;
    const double R = cauchy_radius();
    std::vector<std::complex<double>> vals(M);
    for (int j = 0; j < M; ++j) {
      const double th = 2 * std::numbers::pi * j / M;
      vals[j] = fs(std::complex<double>(R * std::cos(th), R * std::sin(th)));
    }
    for (int k = 1; k <= n; ++k) {
      std::complex<double> s = 0;
      for (int j = 0; j < M; ++j) {
        const double th = -2 * std::numbers::pi * double(j) * k / M;
        s += vals[j] * std::complex<double>(std::cos(th), std::sin(th));
      }
      b[k] = s.real() / M / std::pow(R, k);
    }
    return b;
  }

  // Radius (in xi) inside which the Taylor data are trusted.
  double taylor_radius() const { return is_polynomial() ? INFINITY : 0.04 * cauchy_radius(); }

  // Taylor coefficients v_0..v_n of V_cs(xi) = cs^2 xi^2 - 4(r0^2+xi)F(r0^2+xi)
  std::vector<double> taylor_V_sonic(int n) const {
    auto b = taylor_f(n);
    std::vector<double> v(n + 1, 0.0);
    for (int k = 2; k <= n; ++k) {
      double s = 4 * r02_ * b[k - 1] / k;
      if (k >= 3) s += 4 * b[k - 2] / (k - 1);
      v[k] = s;
    }
    v[2] = 0;  // cs^2 + 2 r0^2 f'(r0^2) = 0 by definition of cs
    return v;
  }

 private:
  template <class T>
  static T expm1_any(T z) {
    if constexpr (std::is_same_v<T, double>) return std::expm1(z);
    else return std::abs(z) < 1e-5 ? z + z * z / 2.0 + z * z * z / 6.0 : std::exp(z) - 1.0;
  }
  template <class T>
  static T log1p_any(T z) {
    if constexpr (std::is_same_v<T, double>) return std::log1p(z);
    else return std::abs(z) < 1e-5 ? z - z * z / 2.0 + z * z * z / 3.0 : std::log(1.0 + z);
  }

  double shift(double rho) const {
    if (!(rho >= 0)) throw Error("domain", "density must be nonnegative");
    return rho - r02_;
  }

  // e^t - 1 - t
  static double exp_tail(double t) {
    if (std::fabs(t) > 0.5) return std::expm1(t) - t;
    double term = t, acc = 0;
    for (int k = 2; k < 40; ++k) {
      term *= t / k;
      acc += term;
      if (std::fabs(term) <= 1e-18 * std::fabs(acc)) break;
    }
    return acc;
  }

  // int_0^u ((1+v)^-nu - 1) dv, for u > -1
  double power_tail(double u) const {
    if (std::fabs(u) > 0.25) {
      const double l = std::log1p(u);
      return (nu_ == 1.0 ? l : std::expm1((1.0 - nu_) * l) / (1.0 - nu_)) - u;
    }
    // sum_{k>=1} binom(-nu, k) u^(k+1) / (k+1)
    double b = 1, p = u, acc = 0;
    for (int k = 1; k < 200; ++k) {
      b *= (-nu_ - (k - 1)) / k;
      p *= u;
      const double t = b * p / (k + 1);
      acc += t;
      if (std::fabs(t) <= 1e-18 * std::fabs(acc)) break;
    }
    return acc;
  }

  double Fs_poly(double xi) const {
    // a_[j] multiplies xi^(j+1) in f, so F = -sum a_[j] xi^(j+2)/(j+2)
    double acc = 0;
    for (std::size_t j = a_.size(); j-- > 0;) acc = acc * xi - a_[j] / double(j + 2);
    return acc * xi * xi;
  }

  double cauchy_radius() const {
    double R = 0.25 * r02_;
    if (spec_.kind == Kind::saturated_rational) R = std::fmin(R, 0.5 * (r02_ + rho0_));
    if (spec_.kind == Kind::tanh_profile) R = std::fmin(R, 0.25 * sigma_ * sigma_ / (2 * r02_));
    return R;
  }

  double param(const char* key, bool required = true, double def = 0) const {
    auto it = spec_.params.find(key);
    if (it == spec_.params.end()) {
      if (required) throw Error("config", std::string("missing parameter '") + key + "'");
      return def;
    }
    return it->second;
  }

  void check_params(std::initializer_list<const char*> allowed) const {
    for (auto& [k, v] : spec_.params) {
      bool ok = false;
      for (auto* a : allowed) ok = ok || k == a;
      if (!ok) throw Error("config", "parameter '" + k + "' not used by kind " + kind_name(spec_.kind));
      if (!std::isfinite(v)) throw Error("config", "parameter '" + k + "' is not finite");
    }
  }

  void build() {
    const Kind k = spec_.kind;
    if (k != Kind::polynomial && !spec_.coeffs.empty())
      throw Error("config", "coeffs only apply to the polynomial kind");
    switch (k) {
      case Kind::polynomial:
        check_params({});
        if (spec_.coeffs.empty()) throw Error("config", "polynomial kind needs coeffs a_1..a_d");
        a_ = spec_.coeffs;
        break;
      case Kind::gross_pitaevskii:
        check_params({});
        a_ = {-1.0};
        break;
      case Kind::saturated_exponential:
        check_params({"rho0"});
        rho0_ = param("rho0");
        if (!(rho0_ > 0)) throw Error("config", "rho0 must be positive");
        break;
      case Kind::saturated_rational:
        check_params({"rho0", "nu"});
        rho0_ = param("rho0");
        nu_ = param("nu", false, 2.0);
        if (!(rho0_ > 0) || !(nu_ > 0)) throw Error("config", "rho0 and nu must be positive");
        break;
      case Kind::tanh_profile: {
        check_params({"alpha", "gamma", "rho0", "sigma"});
        alpha_ = param("alpha");
        gamma_ = param("gamma");
        rho0_ = param("rho0");
        sigma_ = param("sigma");
        if (!(alpha_ > 0) || !(sigma_ > 0))
          throw Error("config", "alpha and sigma must be positive");
        if (!(gamma_ > 1)) throw Error("no_zero", "tanh_profile needs gamma > 1 for f to vanish");
        const double r04 = rho0_ * rho0_ + sigma_ * sigma_ * std::atanh(-1.0 / gamma_);
        if (!(r04 > 0)) throw Error("no_zero", "tanh_profile has no positive zero");
        const double r0 = std::pow(r04, 0.25);
        if (spec_.r0 && std::fabs(*spec_.r0 - r0) > 1e-12 * r0)
          throw Error("config", "r0 inconsistent with tanh_profile parameters");
        r0_ = r0;
        break;
      }
    }
    if (k != Kind::tanh_profile) {
      if (!spec_.r0) throw Error("config", "r0 is required");
      r0_ = *spec_.r0;
    }
    if (!(r0_ > 0) || !std::isfinite(r0_)) throw Error("config", "r0 must be positive");
    r02_ = r0_ * r0_;
    if (k == Kind::saturated_rational) s0_ = 1.0 + r02_ / rho0_;

    const double fp0 = fps(0.0);
    if (!(fp0 < 0)) throw Error("not_defocusing", "f'(r0^2) must be negative");
    cs_ = std::sqrt(-2.0 * r02_ * fp0);

    for (int j = 1; j <= 5; ++j) {
      const double d = 1e-3 * j * r02_;
      if (!(Fs(d) > 0) || !(Fs(-d) > 0))
        throw Error("not_defocusing", "F is not positive near r0^2");
    }

    // sonic index: first nonzero normalized coefficient of xi^(m+3)
    auto v = taylor_V_sonic(9);
    m_.reset();
    lambda_ = 0;
    for (int m = 0; m <= 6; ++m) {
      const double vn = v[m + 3];
      const double norm = vn * std::pow(r02_, m + 1) / (cs_ * cs_);
      if (std::fabs(norm) > 1e-9) {
        m_ = m;
        lambda_ = vn;
        break;
      }
    }
  }

  ModelSpec spec_;
  std::vector<double> a_;
  double r0_ = 1, r02_ = 1, cs_ = 0;
  double rho0_ = 0, nu_ = 2, alpha_ = 0, gamma_ = 0, sigma_ = 1, s0_ = 1;
  std::optional<int> m_;
  double lambda_ = 0;
};

}  // namespace nlsw
