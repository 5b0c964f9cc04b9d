#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "wfsep/errors.hpp"
#include "wfsep/likelihood.hpp"
#include "wfsep/model.hpp"
#include "wfsep/sde.hpp"

namespace wfsep {

inline constexpr double kConditionLimit = 1e12;

enum class Which { Alpha, Beta, S };

struct EstimateReport {
  std::vector<double> estimate;
  std::vector<bool> crystallized;
  std::vector<double> used_horizon;  // per coordinate
  std::vector<bool> clamped;
  Eigen::MatrixXd information;
};

namespace detail {

inline double finite_log(const std::optional<ExtendedReal>& v, const char* what) {
  if (!v || !v->finite()) throw CrystallizeSignal(std::string(what) + " is not finite", -1);
  return v->value();
}

inline double condition_number(const Eigen::MatrixXd& M) {
  if (!M.allFinite()) return std::numeric_limits<double>::infinity();
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(M);
  const auto& s = svd.singularValues();
  if (s(s.size() - 1) <= 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / s(s.size() - 1);
}

}  // namespace detail

// One parameter estimated with the other two held at `known`.
inline double mle_marginal(Which which, const PathFunctionals& f, const EtaSpec& eta, const MutSelParams& known) {
  (void)eta;
  switch (which) {
    case Which::Alpha: {
      if (!f.A.finite()) throw CrystallizeSignal("A_T is infinite: the alpha estimate has crystallized", 0);
      const double A = f.A.value();
      if (!(A > 0.0)) throw CrystallizeSignal("A_T vanishes", 0);
      return 1.0 + (2.0 * detail::finite_log(f.log_ratio_x, "log(X_T/X_0)") + known.beta * f.T - known.s * f.C) / A;
    }
    case Which::Beta: {
      if (!f.B.finite()) throw CrystallizeSignal("B_T is infinite: the beta estimate has crystallized", 1);
      const double B = f.B.value();
      if (!(B > 0.0)) throw CrystallizeSignal("B_T vanishes", 1);
      return 1.0 +
             (2.0 * detail::finite_log(f.log_ratio_1mx, "log((1-X_T)/(1-X_0))") + known.alpha * f.T + known.s * f.D) / B;
    }
    default: {
      if (!(f.E > 0.0) || !std::isfinite(f.E)) throw DegeneratePath("E_T vanishes: the path carries no selection information");
      return (2.0 * f.H_diff - f.eta_prime_term - (known.alpha * f.C - known.beta * f.D)) / f.E;
    }
  }
}

// (alpha, beta) jointly with s known.
inline std::pair<double, double> mle_joint_mut(const PathFunctionals& f, double s_known, const EtaSpec& eta) {
  (void)eta;
  if (!f.A.finite()) throw CrystallizeSignal("A_T is infinite: the alpha estimate has crystallized", 0);
  if (!f.B.finite()) throw CrystallizeSignal("B_T is infinite: the beta estimate has crystallized", 1);
  const double A = f.A.value(), B = f.B.value(), T = f.T;
  Eigen::Matrix2d I;
  I << A, -T, -T, B;
  const double cond = detail::condition_number(I);
  if (!(cond < kConditionLimit))
    throw SingularInformation("observed information is singular (A_T B_T = T^2, e.g. a constant path); condition " +
                                  std::to_string(cond),
                              cond);
  const double lx = detail::finite_log(f.log_ratio_x, "log(X_T/X_0)");
  const double l1 = detail::finite_log(f.log_ratio_1mx, "log((1-X_T)/(1-X_0))");
  const double k = 2.0 / (A * B - T * T);
  const double a = k * (B * lx + T * l1 + 0.5 * B * (A + T) + 0.5 * s_known * (f.D * T - B * f.C));
  const double b = k * (A * l1 + T * lx + 0.5 * A * (B + T) + 0.5 * s_known * (A * f.D - f.C * T));
  return {a, b};
}

// theta0 + I^{-1} Y with all three parameters free.
inline EstimateReport mle_full(const PathFunctionals& f, const EtaSpec& eta, const MutSelParams& p0 = {}) {
  (void)eta;
  if (!f.A.finite()) throw CrystallizeSignal("A_T is infinite: the alpha estimate has crystallized", 0);
  if (!f.B.finite()) throw CrystallizeSignal("B_T is infinite: the beta estimate has crystallized", 1);
  const Eigen::Matrix3d I = information_matrix(f);
  const double cond = detail::condition_number(I);
  if (!(cond < kConditionLimit))
    throw SingularInformation("observed information is singular or ill-conditioned; condition " + std::to_string(cond),
                              cond);
  const Eigen::Vector3d Y = score_vector(f, p0);
  if (!Y.allFinite()) throw CrystallizeSignal("endpoint log terms are not finite", -1);
  const Eigen::Vector3d th = Eigen::Vector3d(p0.alpha, p0.beta, p0.s) + I.ldlt().solve(Y);
  EstimateReport r;
  r.estimate = {th(0), th(1), th(2)};
  r.crystallized = {false, false, false};
  r.clamped = {false, false, false};
  r.used_horizon = {f.T, f.T, f.T};
  r.information = I;
  return r;
}

// Running int (1-X)/X dt (endpoint 0) or int X/(1-X) dt (endpoint 1) at each
// grid point 0..last, with descent clocks; NaN from the first point within
// clip of the endpoint onwards.
inline std::vector<double> cumulative_clock(const SamplePath& path, int endpoint, std::size_t last,
                                            double clip = 1e-12) {
  std::vector<double> out(last + 1, 0.0);
  auto g = [&](double x) { return endpoint == 0 ? (1.0 - x) / x : x / (1.0 - x); };
  auto it = path.descents.begin();
  bool dead = (endpoint == 0 ? path.values[0] : 1.0 - path.values[0]) <= clip;
  if (dead) out[0] = std::numeric_limits<double>::quiet_NaN();
  for (std::size_t i = 0; i < last; ++i) {
    if (dead) {
      out[i + 1] = out[i];
      continue;
    }
    while (it != path.descents.end() && it->index < i) ++it;
    const double xb = path.values[i + 1];
    if ((endpoint == 0 ? xb : 1.0 - xb) <= clip && !(it != path.descents.end() && it->index == i)) {
      dead = true;
      out[i + 1] = std::numeric_limits<double>::quiet_NaN();
      continue;
    }
    if (it != path.descents.end() && it->index == i && it->endpoint == endpoint)
      out[i + 1] = out[i] + it->clock;
    else
      out[i + 1] = out[i] + 0.5 * (path.times[i + 1] - path.times[i]) * (g(path.values[i]) + g(xb));
  }
  return out;
}

inline std::size_t detail_index_at_or_before(const SamplePath& path, double t) {
  std::size_t i = 0;
  while (i + 1 < path.size() && path.times[i + 1] <= t) ++i;
  return i;
}

// Limit of log(distance to the endpoint) / clock on the approach to the first
// hit of `endpoint`, read at the last observed point before the hit.
struct CrystalReading {
  bool available = false;
  double hit_time = 0.0;
  double ratio = 0.0;       // at the last pre-hit point
  double mean_ratio = 0.0;  // averaged over the last recorded points (up to 10)
  double clock = 0.0;       // A (or B) at that point
  double log_distance = 0.0;
  std::size_t points = 0;
};

inline CrystalReading crystal_reading(const SamplePath& path, const EtaSpec& /*eta*/, int endpoint, double clip = 1e-12) {
  CrystalReading r;
  const auto& first = endpoint == 0 ? path.hit0 : path.hit1;
  if (!first) return r;
  r.hit_time = *first;
  const DescentRecord* rec = nullptr;
  for (const auto& d : path.descents)
    if (d.endpoint == endpoint && d.hit && path.times[d.index + 1] == *first) {
      rec = &d;
      break;
    }
  // Cumulative A (or B) at every grid point up to the hit, ignoring the
  // divergence flag of the hit itself.
  const std::size_t last = rec ? rec->index : detail_index_at_or_before(path, *first);
  const std::vector<double> cum = cumulative_clock(path, endpoint, last, clip);
  auto clock_at = [&](std::size_t idx) { return cum[idx]; };
  if (rec) {
    const double base = clock_at(rec->index);
    double sum = 0.0;
    for (const auto& [c, L] : rec->tail) sum += L / (base + c);
    r.points = rec->tail.size();
    r.mean_ratio = sum / static_cast<double>(r.points);
    r.clock = base + rec->tail.back().first;
    r.log_distance = rec->tail.back().second;
    r.ratio = r.log_distance / r.clock;
    r.available = std::isfinite(r.ratio);
    return r;
  }
  // No descent record: use the grid points strictly before the hit.
  std::vector<std::size_t> idx;
  for (std::size_t i = 1; i < path.size() && path.times[i] <= *first; ++i) {
    const double u = endpoint == 0 ? path.values[i] : 1.0 - path.values[i];
    if (u > clip) idx.push_back(i);
  }
  if (idx.empty()) return r;
  const std::size_t from = idx.size() > 10 ? idx.size() - 10 : 0;
  double sum = 0.0;
  for (std::size_t k = from; k < idx.size(); ++k) {
    const std::size_t i = idx[k];
    const double u = endpoint == 0 ? path.values[i] : 1.0 - path.values[i];
    sum += std::log(u) / clock_at(i);
  }
  r.points = idx.size() - from;
  r.mean_ratio = sum / static_cast<double>(r.points);
  const std::size_t i = idx.back();
  r.clock = clock_at(i);
  r.log_distance = std::log(endpoint == 0 ? path.values[i] : 1.0 - path.values[i]);
  r.ratio = r.log_distance / r.clock;
  r.available = std::isfinite(r.ratio);
  return r;
}

namespace detail {

// Absorbed at the endpoint: the path sits there from the hit to the end with
// positive duration, which only an exit boundary (rate 0) allows.
inline bool absorbed_at(const SamplePath& path, int endpoint) {
  const auto& h = endpoint == 0 ? path.hit0 : path.hit1;
  if (!h || !path.absorbed) return false;
  const double e = endpoint == 0 ? 0.0 : 1.0;
  return path.values.back() == e && path.times.back() > *h;
}

inline double crystallized_rate(const SamplePath& path, const EtaSpec& eta, int endpoint) {
  if (absorbed_at(path, endpoint)) return 0.0;
  const CrystalReading c = crystal_reading(path, eta, endpoint);
  if (!c.available) return std::numeric_limits<double>::quiet_NaN();
  return 1.0 + 2.0 * c.ratio;
}

}  // namespace detail

// Joint (alpha, beta) estimator with s known, corrected for separation: a
// mutation rate whose endpoint is hit before T is read off the approach to the
// hit, and the other rate is then estimated alone with it plugged in.
inline EstimateReport corrected_estimator(const SamplePath& path_in, const EtaSpec& eta, double s_known,
                                          double T = std::numeric_limits<double>::infinity()) {
  const SamplePath path = T < path_in.horizon() ? truncate(path_in, T) : path_in;
  const double horizon = path.horizon();
  const double h0 = path.hit0 ? *path.hit0 : std::numeric_limits<double>::infinity();
  const double h1 = path.hit1 ? *path.hit1 : std::numeric_limits<double>::infinity();
  EstimateReport r;
  r.crystallized = {false, false};
  r.clamped = {false, false};
  if (!(h0 <= horizon) && !(h1 <= horizon)) {
    const PathFunctionals f = path_functionals(path, eta);
    const auto [a, b] = mle_joint_mut(f, s_known, eta);
    r.estimate = {a, b};
    r.used_horizon = {horizon, horizon};
    Eigen::Matrix2d I = information_matrix(f).topLeftCorner<2, 2>();
    r.information = I;
    return r;
  }
  const int first = h0 <= h1 ? 0 : 1;
  const int second = 1 - first;
  const double t_first = first == 0 ? h0 : h1;
  const double t_second = second == 0 ? h0 : h1;
  const double rate_first = detail::crystallized_rate(path, eta, first);
  double rate_second;
  double used_second;
  if (t_second <= horizon) {
    rate_second = detail::crystallized_rate(path, eta, second);
    used_second = t_second;
    r.crystallized[static_cast<std::size_t>(second)] = true;
  } else {
    const PathFunctionals f = path_functionals(path, eta);
    MutSelParams known;
    known.s = s_known;
    if (first == 0) {
      known.alpha = rate_first;
      rate_second = std::isfinite(rate_first) ? mle_marginal(Which::Beta, f, eta, known)
                                              : std::numeric_limits<double>::quiet_NaN();
    } else {
      known.beta = rate_first;
      rate_second = std::isfinite(rate_first) ? mle_marginal(Which::Alpha, f, eta, known)
                                              : std::numeric_limits<double>::quiet_NaN();
    }
    used_second = horizon;
  }
  r.crystallized[static_cast<std::size_t>(first)] = true;
  r.estimate.resize(2);
  r.used_horizon.resize(2);
  r.estimate[static_cast<std::size_t>(first)] = rate_first;
  r.estimate[static_cast<std::size_t>(second)] = rate_second;
  r.used_horizon[static_cast<std::size_t>(first)] = t_first;
  r.used_horizon[static_cast<std::size_t>(second)] = used_second;
  r.information = information_matrix(path_functionals(path, eta)).topLeftCorner<2, 2>();
  return r;
}

// alpha, beta -> max(., 0); a third (selection) coordinate is left alone.
inline EstimateReport clamp_to_domain(EstimateReport r) {
  r.clamped.assign(r.estimate.size(), false);
  for (std::size_t i = 0; i < r.estimate.size() && i < 2; ++i)
    if (r.estimate[i] < 0.0) {
      r.estimate[i] = 0.0;
      r.clamped[i] = true;
    }
  return r;
}

}  // namespace wfsep
