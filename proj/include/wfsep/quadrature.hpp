#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <string>

#include <boost/math/quadrature/gauss.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>

#include "wfsep/errors.hpp"

namespace wfsep::quad {

inline constexpr double kDefaultTol = 1e-12;

// Double-exponential (tanh-sinh) quadrature on [a,b]; it tolerates algebraic
// behaviour at the ends and never evaluates f at a or b. Throws
// QuadratureError when the error estimate stays well above tol (relative).
template <class F>
double integrate(F f, double a, double b, double tol = kDefaultTol, const char* what = "integral") {
  if (a == b) return 0.0;
  // The integrator extends its abscissa tables lazily, so one per thread.
  thread_local boost::math::quadrature::tanh_sinh<double> ts(15);
  double err = 0.0;
  double l1 = 0.0;
  double v = ts.integrate(f, a, b, tol, &err, &l1);
  if (!std::isfinite(v) || err > std::max(1e3 * tol, 1e-8) * l1 + 1e-300) throw QuadratureError(what, err);
  return v;
}

// Fixed 30-point Gauss-Legendre. Only for f analytic on a neighbourhood of
// [a,b] reaching at least (b-a)/2 past each end, where it is exact to rounding.
template <class F>
double integrate_gauss(F f, double a, double b, const char* what = "integral") {
  if (a == b) return 0.0;
  const double v = boost::math::quadrature::gauss<double, 30>::integrate(f, a, b);
  if (!std::isfinite(v)) throw QuadratureError(what, std::numeric_limits<double>::infinity());
  return v;
}

// int_lo^hi x^p g(x) dx for 0 <= lo < hi <= 1 with p > -1 and g smooth near 0.
// u = x^{p+1} flattens the algebraic factor completely.
template <class G>
double integrate_power0(double p, G g, double lo, double hi, double tol = kDefaultTol,
                        const char* what = "integral") {
  if (!(p > -1.0)) throw InvalidArgument(std::string(what) + ": exponent at 0 must exceed -1");
  const double q = p + 1.0;
  if (p >= 0.0) {
    // Nothing singular to remove; substituting would create a root singularity.
    return integrate([&](double x) { return std::pow(x, p) * g(x); }, lo, hi, tol, what);
  }
  const double ulo = std::pow(lo, q), uhi = std::pow(hi, q);
  return integrate(
      [&](double u) {
        if (u <= 0.0) return g(0.0) / q;
        return g(std::pow(u, 1.0 / q)) / q;
      },
      ulo, uhi, tol, what);
}

// int_0^1 x^p (1-x)^q g(x) dx with p, q > -1, split at 1/2 and treated with a
// power substitution at each end.
template <class G>
double integrate_beta_weighted(double p, double q, G g, double tol = kDefaultTol,
                               const char* what = "integral") {
  double left = integrate_power0(p, [&](double x) { return std::pow(1.0 - x, q) * g(x); }, 0.0, 0.5, tol, what);
  double right = integrate_power0(q, [&](double y) { return std::pow(1.0 - y, p) * g(1.0 - y); }, 0.0, 0.5, tol, what);
  return left + right;
}

}  // namespace wfsep::quad
