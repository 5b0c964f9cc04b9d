#pragma once

#include <array>
#include <cmath>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "wfsep/errors.hpp"
#include "wfsep/extended_real.hpp"
#include "wfsep/quadrature.hpp"

namespace wfsep {

// theta = (alpha, beta, s): mutation towards the focal allele, mutation away
// from it, and selection.
struct MutSelParams {
  double alpha = 0.0;
  double beta = 0.0;
  double s = 0.0;

  MutSelParams() = default;
  MutSelParams(double a, double b, double sel) : alpha(a), beta(b), s(sel) { validate(); }

  void validate() const {
    if (!std::isfinite(alpha) || !std::isfinite(beta) || !std::isfinite(s))
      throw InvalidArgument("parameters must be finite");
    if (alpha < 0.0) throw InvalidArgument("mutation rate alpha must be nonnegative");
    if (beta < 0.0) throw InvalidArgument("mutation rate beta must be nonnegative");
  }

  // x -> 1-x involution on the rates (eta is mirrored separately).
  MutSelParams swapped() const { return {beta, alpha, s}; }

  friend bool operator==(const MutSelParams&, const MutSelParams&) = default;
};

struct Genic {};
struct Diploid {
  double h = 0.5;
};
struct Polynomial {
  std::vector<double> coeffs;  // eta(x) = sum_k coeffs[k] x^k
};

class EtaSpec {
 public:
  using Variant = std::variant<Genic, Diploid, Polynomial>;

  EtaSpec() : v_(Genic{}) {}
  EtaSpec(Genic g) : v_(g) {}  // NOLINT
  EtaSpec(Diploid d) : v_(d) {  // NOLINT
    if (!std::isfinite(d.h)) throw InvalidArgument("dominance h must be finite");
  }
  EtaSpec(Polynomial p) : v_(std::move(p)) {  // NOLINT
    const auto& c = std::get<Polynomial>(v_).coeffs;
    bool nonzero = false;
    for (double x : c) {
      if (!std::isfinite(x)) throw InvalidArgument("eta coefficients must be finite");
      nonzero = nonzero || x != 0.0;
    }
    if (!nonzero) throw InvalidArgument("eta must not vanish identically on [0,1]");
  }

  static EtaSpec genic() { return EtaSpec(Genic{}); }
  static EtaSpec diploid(double h) { return EtaSpec(Diploid{h}); }
  static EtaSpec polynomial(std::vector<double> c) { return EtaSpec(Polynomial{std::move(c)}); }

  const Variant& variant() const { return v_; }

  // Every variant is a polynomial; this is the canonical coefficient list.
  std::vector<double> coefficients() const {
    if (std::holds_alternative<Genic>(v_)) return {1.0};
    if (auto* d = std::get_if<Diploid>(&v_)) return {d->h, 1.0 - 2.0 * d->h};
    return std::get<Polynomial>(v_).coeffs;
  }

  double eta(double x) const {
    if (std::holds_alternative<Genic>(v_)) return 1.0;
    if (auto* d = std::get_if<Diploid>(&v_)) return x + d->h * (1.0 - 2.0 * x);
    return horner(std::get<Polynomial>(v_).coeffs, x);
  }

  double eta_prime(double x) const {
    if (std::holds_alternative<Genic>(v_)) return 0.0;
    if (auto* d = std::get_if<Diploid>(&v_)) return 1.0 - 2.0 * d->h;
    const auto& c = std::get<Polynomial>(v_).coeffs;
    double r = 0.0;
    for (std::size_t k = c.size(); k-- > 1;) r = r * x + static_cast<double>(k) * c[k];
    return r;
  }

  // Antiderivative with H(0) = 0.
  double H(double x) const {
    if (std::holds_alternative<Genic>(v_)) return x;
    if (auto* d = std::get_if<Diploid>(&v_)) return d->h * x + 0.5 * (1.0 - 2.0 * d->h) * x * x;
    const auto& c = std::get<Polynomial>(v_).coeffs;
    double r = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) r = r * x + c[k] / static_cast<double>(k + 1);
    return r * x;
  }

  // Bound on |eta| over [0,1] (exact for the linear variants).
  double sup_abs() const {
    if (std::holds_alternative<Genic>(v_)) return 1.0;
    if (std::holds_alternative<Diploid>(v_)) return std::max(std::abs(eta(0.0)), std::abs(eta(1.0)));
    double m = 0.0;
    for (int i = 0; i <= 1000; ++i) m = std::max(m, std::abs(eta(i / 1000.0)));
    double lip = 0.0;
    for (int i = 0; i <= 1000; ++i) lip = std::max(lip, std::abs(eta_prime(i / 1000.0)));
    return m + lip / 2000.0;
  }

  // eta'(x) = -eta(1-x), the selection shape seen by the mirrored allele.
  EtaSpec mirrored() const {
    const auto c = coefficients();
    std::vector<double> m(c.size(), 0.0);
    // (1-x)^k = sum_j C(k,j) (-x)^j
    for (std::size_t k = 0; k < c.size(); ++k) {
      double binom = 1.0;
      for (std::size_t j = 0; j <= k; ++j) {
        m[j] -= c[k] * binom * ((j % 2) ? -1.0 : 1.0);
        binom = binom * static_cast<double>(k - j) / static_cast<double>(j + 1);
      }
    }
    return EtaSpec::polynomial(std::move(m));
  }

 private:
  static double horner(const std::vector<double>& c, double x) {
    double r = 0.0;
    for (std::size_t k = c.size(); k-- > 0;) r = r * x + c[k];
    return r;
  }

  Variant v_;
};

enum class BoundaryClass { Exit, RegularReflecting, Entrance };

inline const char* to_string(BoundaryClass b) {
  switch (b) {
    case BoundaryClass::Exit: return "Exit";
    case BoundaryClass::RegularReflecting: return "RegularReflecting";
    default: return "Entrance";
  }
}

inline BoundaryClass classify_rate(double rate) {
  if (rate == 0.0) return BoundaryClass::Exit;
  if (rate < 1.0) return BoundaryClass::RegularReflecting;
  return BoundaryClass::Entrance;
}

struct BoundaryReport {
  BoundaryClass at0;
  BoundaryClass at1;
  bool contains0;  // endpoint belongs to the state space iff its rate < 1
  bool contains1;
};

inline BoundaryReport classify_boundary(const MutSelParams& p) {
  p.validate();
  return {classify_rate(p.alpha), classify_rate(p.beta), p.alpha < 1.0, p.beta < 1.0};
}

inline double drift(const MutSelParams& p, const EtaSpec& eta, double x) {
  return 0.5 * (p.alpha * (1.0 - x) - p.beta * x + p.s * x * (1.0 - x) * eta.eta(x));
}

inline double diffusion(double x) { return std::sqrt(std::max(0.0, x * (1.0 - x))); }

// (mu_{p1} - mu_{p0}) / sigma at an interior point.
inline double drift_gap_over_sigma(const MutSelParams& p1, const MutSelParams& p0, const EtaSpec& eta, double x) {
  if (!(x > 0.0 && x < 1.0)) throw InvalidArgument("drift_gap_over_sigma needs an interior point");
  const double da = p1.alpha - p0.alpha, db = p1.beta - p0.beta, ds = p1.s - p0.s;
  return 0.5 * (da * std::sqrt((1.0 - x) / x) - db * std::sqrt(x / (1.0 - x)) +
                ds * std::sqrt(x * (1.0 - x)) * eta.eta(x));
}

// Scale density s'(y) = y^-alpha (1-y)^-beta exp(-s H(y)).
inline double scale_density(const MutSelParams& p, const EtaSpec& eta, double y) {
  return std::exp(-p.alpha * std::log(y) - p.beta * std::log1p(-y) - p.s * eta.H(y));
}

inline double speed_density(const MutSelParams& p, const EtaSpec& eta, double x) {
  return std::exp((p.alpha - 1.0) * std::log(x) + (p.beta - 1.0) * std::log1p(-x) + p.s * eta.H(x));
}

namespace detail {

// int_{a}^{b} s'(y) dy for 0 < a < b <= 1/2, in the variable v = log y, where
// the integrand exp((1-alpha) v) (1-e^v)^-beta e^{-sH} is smooth for any alpha.
inline double scale_left(const MutSelParams& p, const EtaSpec& eta, double a, double b, double tol) {
  return quad::integrate(
      [&](double v) {
        const double y = std::exp(v);
        return std::exp((1.0 - p.alpha) * v - p.beta * std::log1p(-y) - p.s * eta.H(y));
      },
      std::log(a), std::log(b), tol, "scale function");
}

}  // namespace detail

// S(x) = int_{1/2}^x s'(y) dy.
inline double scale(const MutSelParams& p, const EtaSpec& eta, double x, double tol = 1e-12) {
  if (!(x > 0.0 && x < 1.0)) throw InvalidArgument("scale function needs an interior point");
  if (x == 0.5) return 0.0;
  if (x < 0.5) return -detail::scale_left(p, eta, x, 0.5, tol);
  // w = 1 - y, then v = log w.
  return quad::integrate(
      [&](double v) {
        const double w = std::exp(v);  // w = 1 - y
        return std::exp((1.0 - p.beta) * v - p.alpha * std::log1p(-w) - p.s * eta.H(1.0 - w));
      },
      std::log(1.0 - x), std::log(0.5), tol, "scale function");
}

struct ScaleSpeed {
  double scale;
  double speed_density;
};

inline ScaleSpeed scale_and_speed(const MutSelParams& p, const EtaSpec& eta, double x) {
  return {scale(p, eta, x), speed_density(p, eta, x)};
}

// |S(x) - S(0+)| = int_0^x s'(y) dy; finite iff alpha < 1.
inline ExtendedReal scale_from_zero(const MutSelParams& p, const EtaSpec& eta, double x, double tol = 1e-12) {
  if (p.alpha >= 1.0) return ExtendedReal::pos_inf();
  return quad::integrate_power0(
      -p.alpha, [&](double y) { return std::exp(-p.beta * std::log1p(-y) - p.s * eta.H(y)); }, 0.0, x, tol,
      "scale function from 0");
}

// Mass of the speed measure at an endpoint: infinite exactly for an exit
// (absorbing) boundary, zero otherwise.
inline ExtendedReal speed_atom(const MutSelParams& p, int endpoint) {
  const double rate = endpoint == 0 ? p.alpha : p.beta;
  return rate == 0.0 ? ExtendedReal::pos_inf() : ExtendedReal(0.0);
}

struct StationaryMoments {
  ExtendedReal a_inf, b_inf, c_inf, d_inf, e_inf;
  Eigen::Matrix3d sigma;  // entries set to +inf where a moment diverges
  bool finite() const { return a_inf.finite() && b_inf.finite(); }
};

// Moments of the stationary law pi(dx) ~ x^{alpha-1}(1-x)^{beta-1}e^{sH} dx.
inline StationaryMoments stationary_moments(const MutSelParams& p, const EtaSpec& eta, double tol = 1e-13) {
  p.validate();
  if (p.alpha == 0.0 || p.beta == 0.0)
    throw InvalidArgument("stationary moments need alpha > 0 and beta > 0 (ergodic regime)");
  const double a = p.alpha, b = p.beta;
  auto w = [&](double x) { return std::exp(p.s * eta.H(x)); };
  const double Z = quad::integrate_beta_weighted(a - 1.0, b - 1.0, w, tol, "stationary normalizer");
  StationaryMoments m;
  if (a > 1.0)
    m.a_inf = quad::integrate_beta_weighted(a - 2.0, b, w, tol, "a_inf") / Z;
  else
    m.a_inf = ExtendedReal::pos_inf();
  if (b > 1.0)
    m.b_inf = quad::integrate_beta_weighted(a, b - 2.0, w, tol, "b_inf") / Z;
  else
    m.b_inf = ExtendedReal::pos_inf();
  m.c_inf = quad::integrate_beta_weighted(a - 1.0, b, [&](double x) { return w(x) * eta.eta(x); }, tol, "c_inf") / Z;
  m.d_inf = quad::integrate_beta_weighted(a, b - 1.0, [&](double x) { return w(x) * eta.eta(x); }, tol, "d_inf") / Z;
  m.e_inf = quad::integrate_beta_weighted(
                a, b, [&](double x) { const double e = eta.eta(x); return w(x) * e * e; }, tol, "e_inf") / Z;
  const double c = m.c_inf.value(), d = m.d_inf.value(), e = m.e_inf.value();
  m.sigma << m.a_inf.as_double(), -1.0, c,  //
      -1.0, m.b_inf.as_double(), -d,        //
      c, -d, e;
  return m;
}

// Neutral genic case: the stationary law is Beta(alpha, beta).
inline Eigen::Matrix3d stationary_sigma_neutral_closed_form(double a, double b) {
  if (!(a > 1.0 && b > 1.0)) throw InvalidArgument("closed-form Sigma needs alpha > 1 and beta > 1");
  Eigen::Matrix3d S;
  S << b / (a - 1.0), -1.0, b / (a + b),  //
      -1.0, a / (b - 1.0), -a / (a + b),  //
      b / (a + b), -a / (a + b), a * b / ((a + b) * (a + b + 1.0));
  return S;
}

}  // namespace wfsep
