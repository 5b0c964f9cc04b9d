#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wfsep/errors.hpp"
#include "wfsep/estimation.hpp"
#include "wfsep/likelihood.hpp"
#include "wfsep/model.hpp"
#include "wfsep/parallel.hpp"
#include "wfsep/sde.hpp"
#include "wfsep/stats.hpp"

namespace wfsep {

enum class DivergenceVerdict { Finite, Diverging, Inconclusive };

inline const char* to_string(DivergenceVerdict v) {
  switch (v) {
    case DivergenceVerdict::Finite:
      return "Finite";
    case DivergenceVerdict::Diverging:
      return "Diverging";
    default:
      return "Inconclusive";
  }
}

// int_0^T X^-kappa ds split by the size of X: band j collects the grid points
// with X in [10^-(j+1), 10^-j). Near a reflecting 0 the occupation of band j
// scales like 10^{-j alpha}, so log10 of its contribution has slope
// kappa - alpha in j. partial_sums[k] is the integral over X >= 10^-(k+1).
struct DivergenceDiagnostic {
  std::vector<double> partial_sums;
  std::vector<double> bands;  // contribution of each band j = 0..max_band
  double slope = std::numeric_limits<double>::quiet_NaN();
  DivergenceVerdict verdict = DivergenceVerdict::Inconclusive;
};

struct KappaOptions {
  int first_band = 3;
  int last_band = 6;
  double finite_below = -0.125;  // slope < this: Finite
  double diverge_above = -0.1;   // slope > this: Diverging
};

inline DivergenceDiagnostic kappa_integral_diagnostic(const SamplePath& path, double kappa,
                                                      const KappaOptions& opt = {}) {
  if (!(kappa >= 0.0)) throw InvalidArgument("kappa must be nonnegative");
  if (path.size() < 2) throw InvalidArgument("kappa diagnostic needs a path with at least two points");
  if (opt.first_band < 0 || opt.last_band - opt.first_band < 2)
    throw InvalidArgument("kappa diagnostic needs at least three bands");
  DivergenceDiagnostic d;
  const int nb = opt.last_band + 1;
  d.bands.assign(static_cast<std::size_t>(nb), 0.0);
  const std::size_t n = path.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x = path.values[i];
    if (!(x > 0.0)) continue;
    // Midpoint weights: half of each neighbouring interval.
    const double w = 0.5 * ((i + 1 < n ? path.times[i + 1] : path.times[i]) - (i > 0 ? path.times[i - 1] : path.times[i]));
    const int j = static_cast<int>(std::floor(-std::log10(x)));
    if (j < 0 || j >= nb) continue;
    d.bands[static_cast<std::size_t>(j)] += w * std::pow(x, -kappa);
  }
  double run = 0.0;
  for (double b : d.bands) d.partial_sums.push_back(run += b);
  std::vector<double> jx, ly;
  for (int j = opt.first_band; j <= opt.last_band; ++j) {
    const double b = d.bands[static_cast<std::size_t>(j)];
    if (!(b > 0.0)) return d;  // an empty band says nothing about the rate
    jx.push_back(j);
    ly.push_back(std::log10(b));
  }
  const double mx = stats::mean(jx), my = stats::mean(ly);
  double num = 0.0, den = 0.0;
  for (std::size_t k = 0; k < jx.size(); ++k) {
    num += (jx[k] - mx) * (ly[k] - my);
    den += (jx[k] - mx) * (jx[k] - mx);
  }
  d.slope = num / den;
  if (d.slope < opt.finite_below)
    d.verdict = DivergenceVerdict::Finite;
  else if (d.slope > opt.diverge_above)
    d.verdict = DivergenceVerdict::Diverging;
  return d;
}

// (1 / log t) int_{1/t}^{1/n} dt / Z_t, by the trapezoid rule in log time on
// the grid points inside the window (the integrand s / Z_s interpolated at the
// window ends). For a squared Bessel process of dimension kappa > 2 it tends
// to 1/(kappa - 2).
inline std::vector<double> germ_statistic(const SamplePath& path, int n, const std::vector<double>& t_list) {
  if (n < 1) throw InvalidArgument("germ_statistic: n must be a positive integer");
  if (t_list.empty()) throw InvalidArgument("germ_statistic: empty t list");
  for (std::size_t k = 1; k < t_list.size(); ++k)
    if (!(t_list[k] > t_list[k - 1])) throw InvalidArgument("germ_statistic: t list must be increasing");
  const double upper = 1.0 / n;
  if (path.times.back() < upper) throw InvalidArgument("germ_statistic: path ends before 1/n");
  // Index of the first positive grid time.
  std::size_t first = 0;
  while (first < path.size() && path.times[first] <= 0.0) ++first;
  if (first >= path.size()) throw InvalidArgument("germ_statistic: no positive grid time");
  std::vector<double> ls, g;  // log s, s / Z_s
  // Grid points up to the first one at or past 1/n, for interpolation there.
  for (std::size_t i = first; i < path.size(); ++i) {
    const double z = path.values[i];
    if (!(z > 0.0)) throw InvalidArgument("germ_statistic: path value not positive at t > 0");
    ls.push_back(std::log(path.times[i]));
    g.push_back(path.times[i] / z);
    if (path.times[i] >= upper) break;
  }
  if (ls.size() < 2) throw InvalidArgument("germ_statistic: too few grid points below 1/n");
  auto interp = [&](double x) {
    const auto it = std::upper_bound(ls.begin(), ls.end(), x);
    const std::size_t k = std::clamp<std::size_t>(static_cast<std::size_t>(it - ls.begin()), 1, ls.size() - 1);
    const double w = (x - ls[k - 1]) / (ls[k] - ls[k - 1]);
    return g[k - 1] + w * (g[k] - g[k - 1]);
  };
  const double log_hi = std::log(upper);
  std::vector<double> out;
  for (double t : t_list) {
    if (!(t > n)) throw InvalidArgument("germ_statistic: every t must exceed n");
    const double log_lo = -std::log(t);
    if (log_lo < ls.front() - 1e-9) throw InvalidArgument("germ_statistic: grid does not reach down to 1/t");
    double s = 0.0;
    double xa = log_lo, ya = interp(log_lo);
    for (std::size_t k = 0; k < ls.size(); ++k) {
      if (ls[k] <= log_lo) continue;
      if (ls[k] >= log_hi) break;
      s += 0.5 * (ls[k] - xa) * (g[k] + ya);
      xa = ls[k];
      ya = g[k];
    }
    s += 0.5 * (log_hi - xa) * (interp(log_hi) + ya);
    out.push_back(s / std::log(t));
  }
  return out;
}

// Simulation settings for paths started at 0 whose germ near t = 0 is examined:
// geometric initial steps from t_min.
inline SimConfig germ_config(std::uint64_t seed, std::uint64_t stream, double t_min = 1e-9) {
  SimConfig c;
  c.seed = seed;
  c.stream = stream;
  c.initial_layer_min = t_min;
  c.initial_layer_ratio = 0.5;
  return c;
}

// How two laws started at 0 are told apart on an arbitrarily short window.
enum class GermRegime { BothReflecting, Straddling, BothEntrance };

inline const char* to_string(GermRegime r) {
  switch (r) {
    case GermRegime::BothReflecting:
      return "both_reflecting";
    case GermRegime::Straddling:
      return "straddling";
    default:
      return "both_entrance";
  }
}

struct BoundaryStartOptions {
  double beta = 1.0, s = 0.0;
  double horizon = 20.0;         // simulated time for the kappa integral
  double return_window = 0.1;    // straddling: a visit to 0 in (0, window]
  int germ_n = 2;                // both entrance: window (1/t, 1/n]
  double germ_t = 1e12;
  std::uint64_t seed = 0;
  unsigned workers = default_workers();
};

struct BoundaryStartReport {
  GermRegime regime = GermRegime::BothReflecting;
  double kappa = 0.0;  // both reflecting
  std::vector<double> stat_a, stat_b;
  double target_a = std::numeric_limits<double>::quiet_NaN();
  double target_b = std::numeric_limits<double>::quiet_NaN();
  // Fraction of seeds on which each law gives its expected outcome: Diverging
  // and Finite respectively, a return and no return, or nothing (germ).
  double agree_a = std::numeric_limits<double>::quiet_NaN();
  double agree_b = std::numeric_limits<double>::quiet_NaN();
  double overlap = 1.0;
};

// Statistic separating the laws of WF(alpha_a, beta, s) and WF(alpha_b, beta, s)
// from x0 = 0 on every window (0, t]: a kappa integral verdict between the two
// rates, a return to 0, or the germ statistic of psi(X).
inline BoundaryStartReport boundary_start_singularity_check(double alpha_a, double alpha_b, std::size_t N,
                                                            const BoundaryStartOptions& opt = {},
                                                            const EtaSpec& eta = EtaSpec::genic()) {
  if (!(alpha_a > 0.0) || !(alpha_b > 0.0)) throw InvalidArgument("boundary start check needs positive rates");
  if (alpha_a == alpha_b) throw InvalidArgument("boundary start check needs two different rates");
  if (N == 0) throw InvalidArgument("boundary start check needs at least one seed");
  if (alpha_a > alpha_b) std::swap(alpha_a, alpha_b);
  BoundaryStartReport r;
  const MutSelParams pa(alpha_a, opt.beta, opt.s), pb(alpha_b, opt.beta, opt.s);
  if (alpha_b < 1.0) {
    r.regime = GermRegime::BothReflecting;
    r.kappa = 0.5 * (alpha_a + alpha_b);
    auto run = [&](const MutSelParams& p, std::uint64_t salt) {
      return parallel_map(
          N,
          [&](std::size_t i) {
            const auto path = simulate_wf(p, eta, 0.0, opt.horizon, germ_config(opt.seed + salt, i));
            return kappa_integral_diagnostic(path, r.kappa).slope;
          },
          opt.workers);
    };
    r.stat_a = run(pa, 0);
    r.stat_b = run(pb, 1);
    const KappaOptions ko;
    r.agree_a = static_cast<double>(std::count_if(r.stat_a.begin(), r.stat_a.end(),
                                                  [&](double v) { return v > ko.diverge_above; })) /
                static_cast<double>(N);
    r.agree_b = static_cast<double>(std::count_if(r.stat_b.begin(), r.stat_b.end(),
                                                  [&](double v) { return v < ko.finite_below; })) /
                static_cast<double>(N);
    r.target_a = r.kappa - alpha_a;
    r.target_b = r.kappa - alpha_b;
  } else if (alpha_a < 1.0) {
    r.regime = GermRegime::Straddling;
    auto run = [&](const MutSelParams& p, std::uint64_t salt) {
      return parallel_map(
          N,
          [&](std::size_t i) {
            const auto path = simulate_wf(p, eta, 0.0, opt.return_window, germ_config(opt.seed + salt, i));
            for (double h : path.hits0)
              if (h > 0.0 && h <= opt.return_window) return 1.0;
            return 0.0;
          },
          opt.workers);
    };
    r.stat_a = run(pa, 0);
    r.stat_b = run(pb, 1);
    r.agree_a = stats::mean(r.stat_a);
    r.agree_b = 1.0 - stats::mean(r.stat_b);
    r.target_a = 1.0;
    r.target_b = 0.0;
  } else {
    r.regime = GermRegime::BothEntrance;
    if (alpha_a == 1.0) throw InvalidArgument("germ statistic needs rates above 1");
    const double upper = 1.0 / opt.germ_n;
    auto run = [&](const MutSelParams& p, std::uint64_t salt) {
      return parallel_map(
          N,
          [&](std::size_t i) {
            const auto path = psi_transform(simulate_wf(p, eta, 0.0, upper, germ_config(opt.seed + salt, i, 1.0 / opt.germ_t)));
            return germ_statistic(path, opt.germ_n, {opt.germ_t}).front();
          },
          opt.workers);
    };
    r.stat_a = run(pa, 0);
    r.stat_b = run(pb, 1);
    r.target_a = 1.0 / (2.0 * alpha_a - 2.0);
    r.target_b = 1.0 / (2.0 * alpha_b - 2.0);
  }
  r.overlap = stats::overlap(r.stat_a, r.stat_b);
  return r;
}

// sqrt(T)(theta_hat - theta) whitened by (Sigma/4)^{1/2}, which is asymptotically
// standard normal when both mutation rates exceed 1.
struct CltReport {
  Eigen::Matrix3d sigma;
  std::vector<Eigen::Vector3d> z;
  Eigen::Vector3d mean;
  Eigen::Matrix3d covariance;
  double frobenius_rel = 0.0;  // |cov - I|_F / |I|_F
  Eigen::Vector3d ks_p;        // per-coordinate KS p-values against N(0,1)
  std::size_t failed = 0;      // paths whose information was singular (dropped)
};

struct CltOptions {
  double x0 = 0.5;
  std::uint64_t seed = 0;
  SimConfig sim;
  unsigned workers = default_workers();
};

inline CltReport clt_check(const MutSelParams& p, const EtaSpec& eta, double T, std::size_t N,
                           const CltOptions& opt = {}) {
  p.validate();
  if (!(p.alpha > 1.0 && p.beta > 1.0))
    throw InvalidArgument(
        "the normal limit needs both mutation rates above 1 (otherwise a stationary moment of 1/X or 1/(1-X) "
        "is infinite)");
  if (!(T > 0.0) || N < 2) throw InvalidArgument("clt_check needs T > 0 and at least two seeds");
  const StationaryMoments m = stationary_moments(p, eta);
  if (!m.finite() || !m.sigma.allFinite()) throw InvalidArgument("stationary information matrix is not finite");
  CltReport r;
  r.sigma = m.sigma;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(0.25 * m.sigma);
  const Eigen::Matrix3d root = es.operatorSqrt();
  const Eigen::Vector3d truth(p.alpha, p.beta, p.s);
  auto est = parallel_map(
      N,
      [&](std::size_t i) -> std::optional<Eigen::Vector3d> {
        SimConfig c = opt.sim;
        c.seed = opt.seed;
        c.stream = i;
        const auto path = simulate_wf(p, eta, opt.x0, T, c);
        try {
          const auto rep = mle_full(path_functionals(path, eta), eta);
          const Eigen::Vector3d th(rep.estimate[0], rep.estimate[1], rep.estimate[2]);
          return root * (std::sqrt(T) * (th - truth));
        } catch (const SingularInformation&) {
          return std::nullopt;
        } catch (const CrystallizeSignal&) {
          return std::nullopt;
        }
      },
      opt.workers);
  for (auto& e : est) {
    if (e)
      r.z.push_back(*e);
    else
      ++r.failed;
  }
  if (r.z.size() < 2) throw InvalidArgument("clt_check: fewer than two usable paths");
  const double n = static_cast<double>(r.z.size());
  r.mean.setZero();
  for (const auto& z : r.z) r.mean += z;
  r.mean /= n;
  r.covariance.setZero();
  for (const auto& z : r.z) r.covariance += (z - r.mean) * (z - r.mean).transpose();
  r.covariance /= n - 1.0;
  r.frobenius_rel = (r.covariance - Eigen::Matrix3d::Identity()).norm() / std::sqrt(3.0);
  for (int k = 0; k < 3; ++k) {
    std::vector<double> col;
    for (const auto& z : r.z) col.push_back(z(k));
    r.ks_p(k) = stats::ks_normal(col).p_value;
  }
  return r;
}

// Median absolute error of the joint mutation estimator (s known) over seeds,
// for each horizon.
struct ConsistencyRow {
  double T;
  double median_abs_alpha, median_abs_beta;
  std::size_t failed;
  std::vector<std::array<double, 2>> per_seed;  // |alpha error|, |beta error|; NaN when the estimate failed
};

inline std::vector<ConsistencyRow> consistency_check(const MutSelParams& p, const EtaSpec& eta, double x0,
                                                     const std::vector<double>& horizons, std::size_t N,
                                                     std::uint64_t seed, const SimConfig& sim = {},
                                                     unsigned workers = default_workers()) {
  p.validate();
  std::vector<ConsistencyRow> out;
  for (std::size_t h = 0; h < horizons.size(); ++h) {
    const double T = horizons[h];
    auto err = parallel_map(
        N,
        [&](std::size_t i) {
          SimConfig c = sim;
          c.seed = seed;
          c.stream = i;
          const auto path = simulate_wf(p, eta, x0, T, c);
          try {
            const auto rep = corrected_estimator(path, eta, p.s);
            return std::array<double, 2>{std::abs(rep.estimate[0] - p.alpha), std::abs(rep.estimate[1] - p.beta)};
          } catch (const std::runtime_error&) {
            const double nan = std::numeric_limits<double>::quiet_NaN();
            return std::array<double, 2>{nan, nan};
          }
        },
        workers);
    std::vector<double> ea, eb;
    std::size_t failed = 0;
    for (const auto& e : err) {
      if (std::isfinite(e[0]) && std::isfinite(e[1])) {
        ea.push_back(e[0]);
        eb.push_back(e[1]);
      } else {
        ++failed;
      }
    }
    if (ea.empty()) throw InvalidArgument("consistency_check: no usable path at T = " + std::to_string(T));
    out.push_back({T, stats::median(ea), stats::median(eb), failed, std::move(err)});
  }
  return out;
}

// Approach to a reflecting 0 run to the first hit: the ratio log X / A over the
// last recorded points should sit near (alpha - 1)/2, and the corrected
// estimator returns 1 + 2 * ratio.
struct CrystallizationReport {
  double alpha = 0.0;
  std::vector<double> mean_ratio, estimate;
  double within_fraction = 0.0;  // |ratio - (alpha-1)/2| <= rel_tol |(alpha-1)/2|
  double median_abs_error = 0.0;
  std::size_t no_hit = 0;
};

inline CrystallizationReport crystallization_check(const MutSelParams& p, const EtaSpec& eta, double x0,
                                                   std::size_t N, std::uint64_t seed, double rel_tol = 0.2,
                                                   double T_max = 1e4, const SimConfig& sim = {},
                                                   unsigned workers = default_workers()) {
  p.validate();
  if (!(p.alpha > 0.0 && p.alpha < 1.0)) throw InvalidArgument("crystallization needs alpha in (0,1)");
  struct One {
    bool hit;
    double ratio, est;
  };
  auto res = parallel_map(
      N,
      [&](std::size_t i) {
        SimConfig c = sim;
        c.seed = seed;
        c.stream = i;
        c.stop_on_hit = true;
        const auto path = simulate_wf(p, eta, x0, T_max, c);
        if (!path.hit0) return One{false, 0.0, 0.0};
        const auto cr = crystal_reading(path, eta, 0);
        const auto rep = corrected_estimator(path, eta, p.s);
        return One{true, cr.available ? cr.mean_ratio : std::numeric_limits<double>::quiet_NaN(), rep.estimate[0]};
      },
      workers);
  CrystallizationReport r;
  r.alpha = p.alpha;
  const double target = 0.5 * (p.alpha - 1.0);
  std::size_t ok = 0;
  std::vector<double> err;
  for (const auto& o : res) {
    if (!o.hit) {
      ++r.no_hit;
      continue;
    }
    r.mean_ratio.push_back(o.ratio);
    r.estimate.push_back(o.est);
    if (std::abs(o.ratio - target) <= rel_tol * std::abs(target)) ++ok;
    err.push_back(std::isfinite(o.est) ? std::abs(o.est - p.alpha) : std::numeric_limits<double>::infinity());
  }
  r.within_fraction = static_cast<double>(ok) / static_cast<double>(N);
  r.median_abs_error = err.empty() ? std::numeric_limits<double>::infinity() : stats::median(err);
  return r;
}

// K-allele projection against the scalar diffusion with the implied rates.
struct ProjectionReport {
  MutSelParams implied;
  std::vector<double> p_values;  // one per replication
  std::size_t passed = 0;        // replications with p > 0.01
};

inline ProjectionReport projection_check(const std::vector<double>& nu, const std::vector<double>& x0,
                                         const std::vector<int>& subset, double T, std::size_t N,
                                         std::size_t replications, std::uint64_t seed, const SimConfig& sim = {},
                                         unsigned workers = default_workers()) {
  ProjectionReport r;
  double xB = 0.0;
  for (int i : subset) {
    if (i < 0 || static_cast<std::size_t>(i) >= x0.size()) throw InvalidArgument("subset index out of range");
    xB += x0[static_cast<std::size_t>(i)];
  }
  xB = std::clamp(xB, 0.0, 1.0);
  for (std::size_t rep = 0; rep < replications; ++rep) {
    const std::uint64_t base = seed + 2 * rep;
    auto proj = parallel_map(
        N,
        [&](std::size_t i) {
          SimConfig c = sim;
          c.seed = base;
          c.stream = i;
          return simulate_k_allele_project(nu, x0, subset, T, c).path.values.back();
        },
        workers);
    if (rep == 0) r.implied = simulate_k_allele_project(nu, x0, subset, sim.dt, sim).implied;
    auto direct = parallel_map(
        N,
        [&](std::size_t i) {
          SimConfig c = sim;
          c.seed = base + 1;
          c.stream = i;
          return simulate_wf(r.implied, EtaSpec::genic(), xB, T, c).values.back();
        },
        workers);
    const double pv = stats::ks_two_sample(proj, direct).p_value;
    r.p_values.push_back(pv);
    if (pv > 0.01) ++r.passed;
  }
  return r;
}

// alpha = 0: beta estimated on paths that never reach 1 before T. With no
// separation the error should stay macroscopic rather than collapse.
struct NonConsistencyReport {
  std::size_t eligible = 0;      // seeds with no hit of 1 before T
  std::size_t large_error = 0;   // eligible seeds with |beta_hat - beta| >= threshold
  std::vector<double> errors;
};

inline NonConsistencyReport nonconsistency_check(double beta, double s, const EtaSpec& eta, double x0, double T,
                                                 std::size_t N, std::uint64_t seed, double threshold = 0.05,
                                                 const SimConfig& sim = {}, unsigned workers = default_workers()) {
  const MutSelParams p(0.0, beta, s);
  auto res = parallel_map(
      N,
      [&](std::size_t i) {
        SimConfig c = sim;
        c.seed = seed;
        c.stream = i;
        const auto path = simulate_wf(p, eta, x0, T, c);
        if (path.hit1 && *path.hit1 <= T) return std::numeric_limits<double>::quiet_NaN();
        try {
          const auto rep = corrected_estimator(path, eta, s);
          return std::isfinite(rep.estimate[1]) ? std::abs(rep.estimate[1] - beta)
                                                : std::numeric_limits<double>::infinity();
        } catch (const std::runtime_error&) {
          return std::numeric_limits<double>::infinity();
        }
      },
      workers);
  NonConsistencyReport r;
  for (double e : res) {
    if (std::isnan(e)) continue;
    ++r.eligible;
    r.errors.push_back(e);
    if (e >= threshold) ++r.large_error;
  }
  return r;
}

}  // namespace wfsep
