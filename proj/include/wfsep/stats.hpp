#pragma once

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <vector>

#include <boost/math/distributions/normal.hpp>

#include "wfsep/errors.hpp"

namespace wfsep::stats {

inline double mean(const std::vector<double>& v) {
  if (v.empty()) throw InvalidArgument("mean of an empty sample");
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

inline double median(std::vector<double> v) {
  if (v.empty()) throw InvalidArgument("median of an empty sample");
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + n / 2, v.end());
  const double hi = v[n / 2];
  if (n % 2) return hi;
  return 0.5 * (hi + *std::max_element(v.begin(), v.begin() + n / 2));
}

inline double variance(const std::vector<double>& v) {
  if (v.size() < 2) throw InvalidArgument("variance needs two observations");
  const double m = mean(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size() - 1);
}

// Kolmogorov limiting survival function Q(lambda) = 2 sum (-1)^{k-1} exp(-2k^2 lambda^2).
inline double kolmogorov_q(double lambda) {
  if (lambda < 1e-3) return 1.0;
  if (lambda < 1.18) {
    // Jacobi-transformed series converges fast for small lambda.
    const double pi = 3.14159265358979323846;
    const double y = std::exp(-pi * pi / (8.0 * lambda * lambda));
    double s = 0.0;
    for (int k = 1; k < 50; k += 2) s += std::pow(y, k * k);
    return std::clamp(1.0 - std::sqrt(2.0 * pi) / lambda * s, 0.0, 1.0);
  }
  double s = 0.0, sign = 1.0;
  for (int k = 1; k <= 100; ++k) {
    const double term = std::exp(-2.0 * k * k * lambda * lambda);
    s += sign * term;
    sign = -sign;
    if (term < 1e-17) break;
  }
  return std::clamp(2.0 * s, 0.0, 1.0);
}

struct KsResult {
  double statistic;
  double p_value;
};

// Two-sample Kolmogorov-Smirnov with the Stephens small-sample correction.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw InvalidArgument("KS test needs two nonempty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  const double ne = std::sqrt(na * nb / (na + nb));
  return {d, kolmogorov_q((ne + 0.12 + 0.11 / ne) * d)};
}

// One-sample KS against the standard normal.
inline KsResult ks_normal(std::vector<double> a) {
  if (a.empty()) throw InvalidArgument("KS test needs a nonempty sample");
  std::sort(a.begin(), a.end());
  const boost::math::normal_distribution<double> N;
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double F = boost::math::cdf(N, a[i]);
    d = std::max({d, static_cast<double>(i + 1) / n - F, F - static_cast<double>(i) / n});
  }
  const double sn = std::sqrt(n);
  return {d, kolmogorov_q((sn + 0.12 + 0.11 / sn) * d)};
}

// P(X < Y) + P(X = Y)/2 for independent draws from the two samples
// (Mann-Whitney), by sorting.
inline double auc(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty()) throw InvalidArgument("AUC needs two nonempty samples");
  std::vector<double> ys = y;
  std::sort(ys.begin(), ys.end());
  double s = 0.0;
  for (double v : x) {
    const auto lo = std::lower_bound(ys.begin(), ys.end(), v);
    const auto hi = std::upper_bound(ys.begin(), ys.end(), v);
    s += static_cast<double>(ys.end() - hi) + 0.5 * static_cast<double>(hi - lo);
  }
  return s / (static_cast<double>(x.size()) * static_cast<double>(ys.size()));
}

// Empirical overlap of two statistic distributions: the probability mass on
// the wrong side of a random comparison, min(AUC, 1 - AUC). 0 means the
// samples are perfectly separated.
inline double overlap(const std::vector<double>& x, const std::vector<double>& y) {
  const double a = auc(x, y);
  return std::min(a, 1.0 - a);
}

}  // namespace wfsep::stats
