#pragma once

#include <cmath>
#include <limits>
#include <optional>

#include <Eigen/Dense>

#include "wfsep/errors.hpp"
#include "wfsep/extended_real.hpp"
#include "wfsep/model.hpp"
#include "wfsep/sde.hpp"

namespace wfsep {

// Time integrals of a path over [0, T]:
//   A = int (1-X)/X, B = int X/(1-X), C = int (1-X) eta, D = int X eta,
//   E = int X(1-X) eta^2, F = int X(1-X) eta'(X),
// plus the endpoint terms that replace the stochastic integrals.
struct PathFunctionals {
  ExtendedReal A, B;
  double C = 0.0, D = 0.0, E = 0.0;
  double T = 0.0;
  double x0 = 0.0, xT = 0.0;
  std::optional<ExtendedReal> log_ratio_x;    // log(X_T / X_0); empty when undefined
  std::optional<ExtendedReal> log_ratio_1mx;  // log((1-X_T) / (1-X_0))
  double H_diff = 0.0;
  double eta_prime_term = 0.0;  // F
};

namespace detail {

inline std::optional<ExtendedReal> log_ratio(double num, double den, double clip) {
  const bool n0 = num <= clip, d0 = den <= clip;
  if (n0 && d0) return std::nullopt;
  if (n0) return ExtendedReal::neg_inf();
  if (d0) return ExtendedReal::pos_inf();
  return ExtendedReal(std::log(num) - std::log(den));
}

}  // namespace detail

// Trapezoidal functionals over the grid points 0..last (inclusive). A (resp. B)
// is infinite once a hit of 0 (resp. 1) is recorded by time t_last or a grid
// value comes within `clip` of the endpoint; a finite trapezoidal sum would
// otherwise hide the divergence. Over a descent interval the clock of the
// descent replaces the trapezoid for A (resp. B).
inline PathFunctionals prefix_functionals(const SamplePath& path, const EtaSpec& eta, std::size_t last,
                                          double clip = 1e-12) {
  if (path.times.empty()) throw InvalidArgument("path_functionals: empty path");
  if (last >= path.size()) throw InvalidArgument("path_functionals: index out of range");
  PathFunctionals f;
  const double tl = path.times[last];
  f.T = tl;
  f.x0 = path.values.front();
  f.xT = path.values[last];
  bool infA = path.hit0 && *path.hit0 <= tl;
  bool infB = path.hit1 && *path.hit1 <= tl;
  for (std::size_t i = 0; i <= last; ++i) {
    infA = infA || path.values[i] <= clip;
    infB = infB || 1.0 - path.values[i] <= clip;
  }
  double A = 0.0, B = 0.0, C = 0.0, D = 0.0, E = 0.0, F = 0.0;
  auto it = path.descents.begin();
  double xa = path.values[0];
  double ea = eta.eta(xa);
  for (std::size_t i = 0; i < last; ++i) {
    const double xb = path.values[i + 1];
    const double eb = eta.eta(xb);
    const double h = path.times[i + 1] - path.times[i];
    while (it != path.descents.end() && it->index < i) ++it;
    const DescentRecord* rec = (it != path.descents.end() && it->index == i) ? &*it : nullptr;
    if (!infA) {
      if (rec && rec->endpoint == 0)
        A += rec->clock;
      else
        A += 0.5 * h * ((1.0 - xa) / xa + (1.0 - xb) / xb);
    }
    if (!infB) {
      if (rec && rec->endpoint == 1)
        B += rec->clock;
      else
        B += 0.5 * h * (xa / (1.0 - xa) + xb / (1.0 - xb));
    }
    C += 0.5 * h * ((1.0 - xa) * ea + (1.0 - xb) * eb);
    D += 0.5 * h * (xa * ea + xb * eb);
    E += 0.5 * h * (xa * (1.0 - xa) * ea * ea + xb * (1.0 - xb) * eb * eb);
    F += 0.5 * h * (xa * (1.0 - xa) * eta.eta_prime(xa) + xb * (1.0 - xb) * eta.eta_prime(xb));
    xa = xb;
    ea = eb;
  }
  f.A = infA ? ExtendedReal::pos_inf() : ExtendedReal(A);
  f.B = infB ? ExtendedReal::pos_inf() : ExtendedReal(B);
  f.C = C;
  f.D = D;
  f.E = E;
  f.eta_prime_term = F;
  f.log_ratio_x = detail::log_ratio(f.xT, f.x0, clip);
  f.log_ratio_1mx = detail::log_ratio(1.0 - f.xT, 1.0 - f.x0, clip);
  f.H_diff = eta.H(f.xT) - eta.H(f.x0);
  return f;
}

inline PathFunctionals path_functionals(const SamplePath& path, const EtaSpec& eta, double clip = 1e-12) {
  return prefix_functionals(path, eta, path.size() - 1, clip);
}

// Observed information (1/4)[[A,-T,C],[-T,B,-D],[C,-D,E]]; infinite entries
// are carried as IEEE infinities.
inline Eigen::Matrix3d information_matrix(const PathFunctionals& f) {
  Eigen::Matrix3d I;
  I << f.A.as_double(), -f.T, f.C,  //
      -f.T, f.B.as_double(), -f.D,   //
      f.C, -f.D, f.E;
  return 0.25 * I;
}

// Score-type vector Y with the stochastic integrals removed by Ito's formula,
// relative to the dominating parameter p0. A coordinate that cannot be formed
// (infinite A or B, undefined log term) is returned as NaN.
inline Eigen::Vector3d score_vector(const PathFunctionals& f, const MutSelParams& p0) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  Eigen::Vector3d Y;
  if (f.A.finite() && f.log_ratio_x && f.log_ratio_x->finite()) {
    const double A = f.A.value();
    Y(0) = 0.5 * (f.log_ratio_x->value() + 0.5 * A - 0.5 * (p0.alpha * A - p0.beta * f.T + p0.s * f.C));
  } else {
    Y(0) = nan;
  }
  if (f.B.finite() && f.log_ratio_1mx && f.log_ratio_1mx->finite()) {
    const double B = f.B.value();
    Y(1) = 0.5 * (f.log_ratio_1mx->value() + 0.5 * B + 0.5 * (p0.alpha * f.T - p0.beta * B + p0.s * f.D));
  } else {
    Y(1) = nan;
  }
  Y(2) = 0.5 * (f.H_diff - 0.5 * f.eta_prime_term - 0.5 * (p0.alpha * f.C - p0.beta * f.D + p0.s * f.E));
  return Y;
}

struct LikelihoodValue {
  bool separated = false;  // the likelihood ratio does not exist on this path
  double value = 0.0;      // log L when not separated
};

// The quadratic form (t-t0)'Y - (1/2)(t-t0)'I(t-t0) at any t in R^3; the
// maximiser of an estimator may lie outside the parameter domain.
inline LikelihoodValue log_likelihood_form(const Eigen::Vector3d& theta, const MutSelParams& p0,
                                           const PathFunctionals& f) {
  const Eigen::Vector3d d = theta - Eigen::Vector3d(p0.alpha, p0.beta, p0.s);
  const Eigen::Vector3d Y = score_vector(f, p0);
  const Eigen::Matrix3d I = information_matrix(f);
  double v = 0.0;
  for (int i = 0; i < 3; ++i) {
    if (d(i) == 0.0) continue;
    if (!std::isfinite(Y(i))) return {true, 0.0};
    v += d(i) * Y(i);
    for (int j = 0; j < 3; ++j)
      if (d(j) != 0.0) v -= 0.5 * d(i) * I(i, j) * d(j);
  }
  return {false, v};
}

// log dP_p/dP_p0 on [0,T].
inline LikelihoodValue log_likelihood(const MutSelParams& p, const MutSelParams& p0, const EtaSpec& eta,
                                      const PathFunctionals& f) {
  (void)eta;  // eta enters through the functionals
  return log_likelihood_form(Eigen::Vector3d(p.alpha, p.beta, p.s), p0, f);
}

// Log Radon-Nikodym derivative between two selection coefficients with shared
// mutation rates, computed directly from the path (not from PathFunctionals):
//   ds/2 [H(X_T) - H(X_0) - int (X(1-X)eta'/2 + eta c0) dt] - ds^2/8 int X(1-X)eta^2 dt,
// with c0 the drift under s0.
inline double selection_rnd(const SamplePath& path, const EtaSpec& eta, double alpha, double beta, double s1,
                            double s0) {
  if (path.times.empty()) throw InvalidArgument("selection_rnd: empty path");
  const double ds = s1 - s0;
  if (ds == 0.0) return 0.0;
  const MutSelParams p0(alpha, beta, s0);
  auto g = [&](double x) { return 0.5 * x * (1.0 - x) * eta.eta_prime(x) + eta.eta(x) * drift(p0, eta, x); };
  auto q = [&](double x) {
    const double e = eta.eta(x);
    return x * (1.0 - x) * e * e;
  };
  double G = 0.0, Q = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) {
    const double h = path.times[i + 1] - path.times[i];
    G += 0.5 * h * (g(path.values[i]) + g(path.values[i + 1]));
    Q += 0.5 * h * (q(path.values[i]) + q(path.values[i + 1]));
  }
  const double dH = eta.H(path.values.back()) - eta.H(path.values.front());
  return 0.5 * ds * (dH - G) - ds * ds / 8.0 * Q;
}

}  // namespace wfsep
