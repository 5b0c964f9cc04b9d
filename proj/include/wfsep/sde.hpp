#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <numbers>
#include <optional>
#include <utility>
#include <vector>

#include <boost/math/special_functions/bessel.hpp>

#include "wfsep/errors.hpp"
#include "wfsep/model.hpp"
#include "wfsep/rng.hpp"

namespace wfsep {

// A stretch of the path near an endpoint simulated in the clock
// A = int (1-X)/X dt (resp. int X/(1-X) dt near 1), in which log X is a
// Brownian motion with drift (rate-1)/2 up to O(X) terms. It covers the grid
// interval (index, index + 1).
struct DescentRecord {
  std::size_t index = 0;
  int endpoint = 0;
  double clock = 0.0;    // contribution to A (or B) over the interval
  double elapsed = 0.0;  // real time spent
  double final_log = 0.0;
  bool hit = false;
  std::vector<std::pair<double, double>> tail;  // (clock since start, log distance) for the last steps
};

struct SamplePath {
  std::vector<double> times;
  std::vector<double> values;
  std::optional<double> hit0, hit1;  // first hitting times
  std::vector<double> hits0, hits1;  // every recorded hit
  std::vector<DescentRecord> descents;
  bool absorbed = false;

  std::size_t size() const { return times.size(); }
  double horizon() const { return times.empty() ? 0.0 : times.back(); }

  // Checks the grid invariants; throws InvalidArgument on violation.
  void validate(bool unit_interval = true) const {
    if (times.size() != values.size() || times.empty()) throw InvalidArgument("path: empty or ragged grid");
    if (times.front() != 0.0) throw InvalidArgument("path: grid must start at t = 0");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1])) throw InvalidArgument("path: times must be strictly increasing");
    for (double v : values) {
      if (!std::isfinite(v)) throw InvalidArgument("path: non-finite value");
      if (unit_interval && (v < 0.0 || v > 1.0)) throw InvalidArgument("path: value outside [0,1]");
      if (!unit_interval && v < 0.0) throw InvalidArgument("path: negative value");
    }
  }
};

struct SimConfig {
  double dt = 1e-3;
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;  // path index within a batch
  double hit_epsilon = 5e-3;
  int substep_factor = 16;

  // Before the first visit to a reflecting endpoint the boundary layer uses
  // steps of at most adaptive_fraction * distance, and below descent_threshold
  // the clock-A descent takes over; log_floor ends a descent in a hit.
  bool crystallize = true;
  double adaptive_fraction = 0.1;
  double descent_threshold = 1e-7;
  double log_floor = -2000.0;
  double clock_step = 1.0;
  int descent_tail = 10;

  // Geometric initial grid (first step initial_layer_min, growing by
  // 1/initial_layer_ratio up to the substep); 0 disables it.
  double initial_layer_min = 0.0;
  double initial_layer_ratio = 0.5;

  bool stop_on_hit = false;
  bool allow_endpoint_start = true;

  double substep() const { return dt / substep_factor; }

  void validate() const {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw InvalidArgument("dt must be positive");
    if (!(hit_epsilon > 0.0 && hit_epsilon < 0.5)) throw InvalidArgument("hit_epsilon must lie in (0, 1/2)");
    if (substep_factor < 1) throw InvalidArgument("substep_factor must be >= 1");
    if (!(adaptive_fraction > 0.0 && adaptive_fraction <= 1.0)) throw InvalidArgument("adaptive_fraction in (0,1]");
    if (!(descent_threshold > 0.0 && descent_threshold < hit_epsilon))
      throw InvalidArgument("descent_threshold must lie in (0, hit_epsilon)");
    if (!(log_floor < std::log(descent_threshold))) throw InvalidArgument("log_floor must be below the threshold");
    if (!(clock_step > 0.0)) throw InvalidArgument("clock_step must be positive");
    if (initial_layer_min < 0.0) throw InvalidArgument("initial_layer_min must be nonnegative");
    if (!(initial_layer_ratio > 0.0 && initial_layer_ratio < 1.0))
      throw InvalidArgument("initial_layer_ratio must lie in (0,1)");
  }
};

// P(a squared Bessel bridge of index -nu, nu in (0,1), visits 0), where
// w = sqrt(z0 z1) / tau. Killed and reflected transition densities differ only
// through I_nu versus I_{-nu}.
inline double bessel_bridge_hit_probability(double nu, double w) {
  if (!(w > 0.0)) return 1.0;
  // 1 - I_nu/I_{-nu} = c K_nu / I_{-nu} with c = 2 sin(nu pi)/pi; the ratio form cancels.
  const double c = 2.0 * std::sin(nu * std::numbers::pi) / std::numbers::pi;
  if (w > 50.0) {
    const double mu = 4.0 * nu * nu - 1.0;
    const double q = c * std::numbers::pi * std::exp(-2.0 * w) * (1.0 + mu / (8.0 * w)) / (1.0 - mu / (8.0 * w));
    return q / (1.0 + q);
  }
  const double k = c * boost::math::cyl_bessel_k(nu, w);
  return std::clamp(k / boost::math::cyl_bessel_i(-nu, w), 0.0, 1.0);
}

namespace detail {

class WFSimulator {
 public:
  WFSimulator(const MutSelParams& p, const EtaSpec& eta, const SimConfig& cfg)
      : p_(p), eta_(eta), cfg_(cfg), rng_(cfg.seed, cfg.stream) {}

  SamplePath run(double x0, double T) {
    p_.validate();
    cfg_.validate();
    if (!(x0 >= 0.0 && x0 <= 1.0)) throw InvalidArgument("x0 must lie in [0,1]");
    if (!(T > 0.0) || !std::isfinite(T)) throw InvalidArgument("horizon T must be positive");
    if ((x0 == 0.0 || x0 == 1.0) && !cfg_.allow_endpoint_start)
      throw InvalidArgument("endpoint start requested but endpoint starts are disabled");
    T_ = T;
    t_ = 0.0;
    x_ = x0;
    push();
    if (x0 == 0.0 || x0 == 1.0) {
      const int e = x0 == 0.0 ? 0 : 1;
      const double rate = e == 0 ? p_.alpha : p_.beta;
      if (rate == 0.0) {
        hit(e, 0.0);
        absorb(e);
        return std::move(path_);
      }
      if (rate < 1.0) hit(e, 0.0);
    }
    if (cfg_.initial_layer_min > 0.0) {
      double h = cfg_.initial_layer_min;
      while (!stopped_ && h < cfg_.substep() && t_ < T_) {
        const double target = std::min(T_, t_ + h);
        layer_step(endpoint_of(x_), target - t_);
        h /= cfg_.initial_layer_ratio;
      }
    }
    const double h_base = cfg_.dt;
    double next = 0.0;
    std::uint64_t k = 0;
    while (!stopped_ && t_ < T_) {
      do {
        ++k;
        next = std::min(T_, h_base * static_cast<double>(k));
      } while (next <= t_);
      if (in_layer(x_)) {
        layer_advance(next);
        continue;
      }
      const double h = next - t_;
      const double xn = x_ + drift(p_, eta_, x_) * h + diffusion(x_) * std::sqrt(h) * rng_.normal();
      if (xn > 0.0 && xn < 1.0) {
        t_ = next;
        x_ = xn;
        push();
      } else {
        layer_advance(next);
      }
    }
    return std::move(path_);
  }

 private:
  bool in_layer(double x) const { return x < cfg_.hit_epsilon || x > 1.0 - cfg_.hit_epsilon; }
  static int endpoint_of(double x) { return x < 0.5 ? 0 : 1; }
  double rate(int e) const { return e == 0 ? p_.alpha : p_.beta; }

  void push() {
    path_.times.push_back(t_);
    path_.values.push_back(x_);
  }

  void hit(int e, double when) {
    auto& first = e == 0 ? path_.hit0 : path_.hit1;
    if (!first) first = when;
    (e == 0 ? path_.hits0 : path_.hits1).push_back(when);
    if (cfg_.stop_on_hit) stopped_ = true;
  }

  void absorb(int e) {
    x_ = e == 0 ? 0.0 : 1.0;
    path_.absorbed = true;
    if (path_.values.back() != x_) {
      // Only reachable from the recorded left point; close the substep at the endpoint.
      t_ = std::nextafter(t_, std::numeric_limits<double>::infinity());
      push();
    }
    if (t_ < T_) {
      t_ = T_;
      push();
    }
    stopped_ = true;
  }

  void layer_advance(double target) {
    while (!stopped_ && t_ < target) {
      const int e = endpoint_of(x_);
      const double u = e == 0 ? x_ : 1.0 - x_;
      const double r = rate(e);
      double h = std::min(cfg_.substep(), target - t_);
      const bool first_visit = cfg_.crystallize && r > 0.0 && r < 1.0 && !(e == 0 ? path_.hit0 : path_.hit1);
      if (first_visit) {
        if (u < cfg_.descent_threshold) {
          descent(e, target);
          continue;
        }
        h = std::min(h, cfg_.adaptive_fraction * u);
      }
      layer_step(e, h);
    }
  }

  // Exact transition of the CIR surrogate for Y = 4u, u the distance to the
  // endpoint: dY = (2 rate - b Y) dt + 2 sqrt(Y) dW, with b frozen at the
  // current state.
  void layer_step(int e, double h) {
    const double u = e == 0 ? x_ : 1.0 - x_;
    const double x = x_;
    const double r = rate(e);
    const double b = e == 0 ? 0.5 * (p_.alpha + p_.beta - p_.s * (1.0 - x) * eta_.eta(x))
                            : 0.5 * (p_.alpha + p_.beta + p_.s * x * eta_.eta(x));
    const double dof = 2.0 * r;
    const double y0 = 4.0 * u;
    const double c = b != 0.0 ? -std::expm1(-b * h) / b : h;
    const double lambda = y0 * std::exp(-b * h) / c;
    const double y1 = c * rng_.noncentral_chi2(dof, lambda);
    const double u1 = std::min(0.25 * y1, 1.0);
    const double t_left = t_;
    bool touched = false;
    if (dof == 0.0) {
      touched = y1 == 0.0;
    } else if (dof < 2.0 && y0 > 0.0) {
      const double nu = 1.0 - 0.5 * dof;
      const double tau = b != 0.0 ? std::expm1(b * h) / b : h;
      const double w = std::sqrt(y0 * y1 * std::exp(b * h)) / tau;
      touched = rng_.uniform() < bessel_bridge_hit_probability(nu, w);
    }
    t_ = t_left + h;
    x_ = e == 0 ? u1 : 1.0 - u1;
    if (touched && dof == 0.0) {
      hit(e, t_left);
      x_ = e == 0 ? 0.0 : 1.0;
      push();
      absorb(e);
      return;
    }
    push();
    if (touched) hit(e, t_left);
  }

  void descent(int e, double target) {
    DescentRecord rec;
    rec.index = path_.times.size() - 1;
    rec.endpoint = e;
    const double r = rate(e), other = e == 0 ? p_.beta : p_.alpha;
    const double log_exit = std::log(cfg_.descent_threshold);
    double L = std::log(e == 0 ? x_ : 1.0 - x_);
    double clock = 0.0, elapsed = 0.0;
    std::deque<std::pair<double, double>> tail;
    tail.emplace_back(0.0, L);
    for (;;) {
      const double u = std::exp(L);
      const double x = e == 0 ? u : 1.0 - u;
      double dA = cfg_.clock_step;
      double dreal = u / (1.0 - u) * dA;
      bool truncated = false;
      if (t_ + elapsed + dreal >= target) {
        const double room = std::max(0.0, target - t_ - elapsed);
        dA *= room / dreal;
        dreal = room;
        truncated = true;
      }
      // (-other + s(1-u) eta_e(u)) with eta_e the shape seen from endpoint e.
      const double sel = e == 0 ? p_.s * (1.0 - x) * eta_.eta(x) : -p_.s * x * eta_.eta(x);
      const double mu = 0.5 * (r - 1.0) + 0.5 * (-other + sel) * u / (1.0 - u);
      L += mu * dA + std::sqrt(dA) * rng_.normal();
      clock += dA;
      elapsed += dreal;
      tail.emplace_back(clock, L);
      if (static_cast<int>(tail.size()) > cfg_.descent_tail) tail.pop_front();
      if (L <= cfg_.log_floor) {
        rec.hit = true;
        break;
      }
      if (L > log_exit || truncated) break;
    }
    rec.clock = clock;
    rec.elapsed = elapsed;
    rec.final_log = L;
    rec.tail.assign(tail.begin(), tail.end());
    const double u_end = rec.hit ? 0.0 : std::exp(L);
    double t_new = t_ + elapsed;
    if (!(t_new > t_)) t_new = std::nextafter(t_, std::numeric_limits<double>::infinity());
    t_ = t_new;
    x_ = e == 0 ? u_end : 1.0 - u_end;
    path_.descents.push_back(std::move(rec));
    push();
    if (path_.descents.back().hit) hit(e, t_);
  }

  MutSelParams p_;
  EtaSpec eta_;
  SimConfig cfg_;
  Rng rng_;
  SamplePath path_;
  double T_ = 0.0, t_ = 0.0, x_ = 0.0;
  bool stopped_ = false;
};

}  // namespace detail

inline SamplePath simulate_wf(const MutSelParams& p, const EtaSpec& eta, double x0, double T, const SimConfig& cfg) {
  return detail::WFSimulator(p, eta, cfg).run(x0, T);
}

// Squared Bessel process dZ = kappa dt + 2 sqrt(Z) dW sampled exactly on a grid.
inline SamplePath simulate_bessel_sq(double kappa, double z0, const std::vector<double>& grid, std::uint64_t seed,
                                     std::uint64_t stream = 0) {
  if (!(kappa >= 0.0) || !(z0 >= 0.0)) throw InvalidArgument("kappa and z0 must be nonnegative");
  if (grid.empty() || grid.front() != 0.0) throw InvalidArgument("Bessel grid must start at 0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw InvalidArgument("Bessel grid must be strictly increasing");
  Rng rng(seed, stream);
  SamplePath path;
  path.times = grid;
  path.values.resize(grid.size());
  double z = z0;
  path.values[0] = z;
  if (z == 0.0 && kappa == 0.0) path.hit0 = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) {
    const double h = grid[i] - grid[i - 1];
    if (z == 0.0 && kappa == 0.0) {
      path.values[i] = 0.0;
      continue;
    }
    z = h * rng.noncentral_chi2(kappa, z / h);
    if (z == 0.0 && !path.hit0) path.hit0 = grid[i - 1];
    path.values[i] = z;
  }
  if (kappa == 0.0 && path.hit0) path.absorbed = true;
  return path;
}

// 0, then n_per_decade log-spaced points per decade from t_min up to t_max.
inline std::vector<double> log_grid(double t_min, double t_max, int n_per_decade) {
  if (!(t_min > 0.0 && t_max > t_min) || n_per_decade < 1) throw InvalidArgument("log_grid: bad range");
  std::vector<double> g{0.0};
  const double lo = std::log10(t_min), hi = std::log10(t_max);
  const int n = static_cast<int>(std::ceil((hi - lo) * n_per_decade));
  for (int i = 0; i <= n; ++i) g.push_back(std::pow(10.0, lo + (hi - lo) * i / n));
  g.back() = t_max;
  return g;
}

struct ProjectedPath {
  SamplePath path;
  MutSelParams implied;  // (nu(B), nu(E \ B), 0)
};

// Neutral K-allele Wright-Fisher with parent-independent mutation,
// dX_i = (nu_i - |nu| X_i)/2 dt + sqrt(X_i) dW_i - X_i sum_j sqrt(X_j) dW_j,
// projected onto sum_{i in B} X_i. `subset` holds 0-based allele indices.
inline ProjectedPath simulate_k_allele_project(const std::vector<double>& nu, const std::vector<double>& x0,
                                               const std::vector<int>& subset, double T, const SimConfig& cfg) {
  const std::size_t K = nu.size();
  if (K < 2) throw InvalidArgument("need at least two alleles");
  if (x0.size() != K) throw InvalidArgument("x0 must have one entry per allele");
  double nsum = 0.0, xsum = 0.0;
  for (double v : nu) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument("mutation weights must be finite and positive");
    nsum += v;
  }
  for (double v : x0) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("x0 is not a point of the simplex");
    xsum += v;
  }
  if (std::abs(xsum - 1.0) > 1e-12) throw InvalidArgument("x0 is not a point of the simplex (entries must sum to 1)");
  std::vector<char> inB(K, 0);
  for (int i : subset) {
    if (i < 0 || static_cast<std::size_t>(i) >= K) throw InvalidArgument("subset index out of range");
    inB[static_cast<std::size_t>(i)] = 1;
  }
  cfg.validate();
  if (!(T > 0.0)) throw InvalidArgument("horizon T must be positive");
  double nuB = 0.0;
  std::size_t countB = 0;
  for (std::size_t i = 0; i < K; ++i)
    if (inB[i]) {
      nuB += nu[i];
      ++countB;
    }
  ProjectedPath out;
  out.implied = MutSelParams(nuB, nsum - nuB, 0.0);
  const bool everything = countB == K, nothing = countB == 0;

  Rng rng(cfg.seed, cfg.stream);
  std::vector<double> x = x0, z(K), xn(K);
  std::vector<char> layer(K);
  auto project = [&] {
    if (everything) return 1.0;
    if (nothing) return 0.0;
    double v = 0.0;
    for (std::size_t i = 0; i < K; ++i)
      if (inB[i]) v += x[i];
    return std::clamp(v, 0.0, 1.0);
  };
  double t = 0.0;
  out.path.times.push_back(0.0);
  out.path.values.push_back(project());
  std::uint64_t k = 0;
  while (t < T) {
    ++k;
    const double next = std::min(T, cfg.dt * static_cast<double>(k));
    const double h = next - t;
    const double sh = std::sqrt(h);
    double S = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      z[i] = rng.normal();
      S += std::sqrt(x[i]) * z[i];
    }
    double layer_mass = 0.0, free_mass = 0.0;
    for (std::size_t i = 0; i < K; ++i) {
      xn[i] = x[i] + 0.5 * (nu[i] - nsum * x[i]) * h + sh * (std::sqrt(x[i]) * z[i] - x[i] * S);
      layer[i] = x[i] < cfg.hit_epsilon || xn[i] <= 0.0;
      if (layer[i]) {
        // Marginal of a single allele is WF(nu_i, |nu| - nu_i, 0): CIR surrogate near 0.
        const double b = 0.5 * nsum;
        const double c = -std::expm1(-b * h) / b;
        xn[i] = std::min(1.0, 0.25 * c * rng.noncentral_chi2(2.0 * nu[i], 4.0 * x[i] * std::exp(-b * h) / c));
        layer_mass += xn[i];
      } else {
        free_mass += xn[i];
      }
    }
    if (free_mass > 0.0 && layer_mass < 1.0) {
      const double f = (1.0 - layer_mass) / free_mass;
      for (std::size_t i = 0; i < K; ++i)
        if (!layer[i]) xn[i] *= f;
    } else {
      double tot = 0.0;
      for (std::size_t i = 0; i < K; ++i) tot += (xn[i] = std::max(0.0, xn[i]));
      for (std::size_t i = 0; i < K; ++i) xn[i] /= tot;
    }
    x.swap(xn);
    t = next;
    out.path.times.push_back(t);
    out.path.values.push_back(project());
  }
  return out;
}

inline double psi(double x) {
  const double a = std::acos(std::clamp(1.0 - 2.0 * x, -1.0, 1.0));
  return a * a;
}

inline double psi_inverse(double y) { return 0.5 * (1.0 - std::cos(std::sqrt(std::max(0.0, y)))); }

// Pointwise psi(x) = arccos(1 - 2x)^2, mapping [0,1] onto [0, pi^2].
inline SamplePath psi_transform(const SamplePath& path) {
  SamplePath out = path;
  for (double& v : out.values) {
    if (!(v >= 0.0 && v <= 1.0)) throw InvalidArgument("psi_transform needs values in [0,1]");
    v = psi(v);
  }
  return out;
}

// Restriction of a path to [0, t]; the end point is linearly interpolated.
inline SamplePath truncate(const SamplePath& path, double t) {
  if (!(t > 0.0)) throw InvalidArgument("truncate: t must be positive");
  SamplePath out;
  std::size_t i = 0;
  while (i < path.times.size() && path.times[i] <= t) {
    out.times.push_back(path.times[i]);
    out.values.push_back(path.values[i]);
    ++i;
  }
  if (out.times.back() < t && i < path.times.size()) {
    const double t0 = path.times[i - 1], t1 = path.times[i];
    const double w = (t - t0) / (t1 - t0);
    out.times.push_back(t);
    out.values.push_back(path.values[i - 1] + w * (path.values[i] - path.values[i - 1]));
  }
  auto keep = [&](const std::optional<double>& h) { return h && *h <= t ? h : std::nullopt; };
  out.hit0 = keep(path.hit0);
  out.hit1 = keep(path.hit1);
  for (double h : path.hits0)
    if (h <= t) out.hits0.push_back(h);
  for (double h : path.hits1)
    if (h <= t) out.hits1.push_back(h);
  for (const auto& d : path.descents)
    if (d.index + 1 < out.times.size()) out.descents.push_back(d);
  out.absorbed = path.absorbed && out.times.back() >= path.times.back();
  return out;
}

}  // namespace wfsep
