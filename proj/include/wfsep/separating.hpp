#pragma once

#include <array>
#include <cmath>
#include <string>
#include <vector>

#include "wfsep/errors.hpp"
#include "wfsep/model.hpp"
#include "wfsep/quadrature.hpp"

namespace wfsep {

enum class VerdictKind { Delta, Infinity, HitZero, HitOne, HitEither };

inline const char* to_string(VerdictKind k) {
  switch (k) {
    case VerdictKind::Delta: return "Delta";
    case VerdictKind::Infinity: return "Infinity";
    case VerdictKind::HitZero: return "HitZero";
    case VerdictKind::HitOne: return "HitOne";
    default: return "HitEither";
  }
}

// Symbolic separating time. bar = true means the hitting time takes the value
// delta (not infinity) on the event that the endpoint is never reached.
struct SeparationVerdict {
  VerdictKind kind = VerdictKind::Delta;
  bool bar = false;

  static SeparationVerdict delta() { return {VerdictKind::Delta, false}; }
  static SeparationVerdict infinity() { return {VerdictKind::Infinity, false}; }
  static SeparationVerdict hit0(bool b = false) { return {VerdictKind::HitZero, b}; }
  static SeparationVerdict hit1(bool b = false) { return {VerdictKind::HitOne, b}; }
  static SeparationVerdict hit_either() { return {VerdictKind::HitEither, false}; }

  friend bool operator==(const SeparationVerdict&, const SeparationVerdict&) = default;

  std::string str() const {
    std::string s = to_string(kind);
    if (kind == VerdictKind::HitZero || kind == VerdictKind::HitOne) s += bar ? "(bar)" : "";
    return s;
  }
};

struct SeparatingPoints {
  bool zero = false;
  bool one = false;
  bool empty() const { return !zero && !one; }
  friend bool operator==(const SeparatingPoints&, const SeparatingPoints&) = default;
};

// An endpoint is non-separating exactly when both laws share a rate below 1
// there; equal rates >= 1 still count as separating.
inline SeparatingPoints separating_points(const MutSelParams& p0, const MutSelParams& p1) {
  SeparatingPoints a;
  a.zero = !(p0.alpha == p1.alpha && p0.alpha < 1.0);
  a.one = !(p0.beta == p1.beta && p0.beta < 1.0);
  return a;
}

struct SeparationDiagnostic {
  bool canonical_swap = false;  // rates were exchanged to reach alpha1 <= beta1
  SeparatingPoints points;      // in canonical orientation
  SeparationVerdict U, V, R;    // raw terms, canonical orientation
  SeparationVerdict U_simplified, V_simplified;
  SeparationVerdict verdict;  // in the caller's orientation
};

namespace detail {

inline SeparationVerdict exchange_endpoints(SeparationVerdict v) {
  if (v.kind == VerdictKind::HitZero)
    v.kind = VerdictKind::HitOne;
  else if (v.kind == VerdictKind::HitOne)
    v.kind = VerdictKind::HitZero;
  return v;
}

// Rewrites T_e / bar-T_e using the law of the hitting times under
// (alpha, beta) = rates of the measure the verdict is stated under.
inline SeparationVerdict simplify_hit(SeparationVerdict v, double own_rate, double other_rate) {
  if (v.kind != VerdictKind::HitZero && v.kind != VerdictKind::HitOne) return v;
  if (own_rate >= 1.0) return v.bar ? SeparationVerdict::delta() : SeparationVerdict::infinity();
  if (v.bar && other_rate > 0.0) v.bar = false;  // T < inf a.s., so the bar is immaterial
  return v;
}

// min on the extended time axis [0, inf] U {delta}, with inf < delta.
inline SeparationVerdict time_min(SeparationVerdict a, SeparationVerdict b) {
  using K = VerdictKind;
  if (a.kind == K::Delta) return b;
  if (b.kind == K::Delta) return a;
  if (a.kind == K::Infinity && b.kind == K::Infinity) return a;
  if (a.kind == K::Infinity) std::swap(a, b);
  if (b.kind == K::Infinity) {
    // min(inf, T) = T and min(inf, bar T) = T.
    if (a.kind == K::HitEither) return a;
    return {a.kind, false};
  }
  if (a.kind == b.kind) return {a.kind, a.bar && b.bar};
  // Two distinct endpoints. min(T_0, bar T_1) = T_0 ^ T_1 pathwise; the case
  // min(bar T_0, bar T_1) only survives simplification when both rates are 0,
  // where T_0 ^ T_1 < inf a.s., so the bar is again immaterial.
  return SeparationVerdict::hit_either();
}

}  // namespace detail

// Separating time for (P_{p0}, P_{p1}), stated under P_{p1}, with diagnostics.
inline SeparationDiagnostic separating_time_diagnostic(const MutSelParams& p0_in, const MutSelParams& p1_in) {
  p0_in.validate();
  p1_in.validate();
  SeparationDiagnostic d;
  MutSelParams p0 = p0_in, p1 = p1_in;
  if (p1.alpha > p1.beta) {
    p0 = p0.swapped();
    p1 = p1.swapped();
    d.canonical_swap = true;
  }
  d.points = separating_points(p0, p1);
  if (p0 == p1) {
    d.U = d.V = d.R = d.U_simplified = d.V_simplified = d.verdict = SeparationVerdict::delta();
    return d;
  }
  const double a1 = p1.alpha, b1 = p1.beta;

  // U: T_0 when the path a.s. creeps down to 0 before T_0 (beta1 > 0);
  // otherwise that only happens on {T_0 < inf}, which is bar T_0.
  if (d.points.zero) d.U = SeparationVerdict::hit0(!(b1 > 0.0));
  if (d.points.one) d.V = SeparationVerdict::hit1(!(a1 > 0.0));
  const bool both_reflecting_shared = p0.alpha == p1.alpha && p0.beta == p1.beta && a1 > 0.0 && a1 < 1.0 &&
                                      b1 > 0.0 && b1 < 1.0;
  d.R = both_reflecting_shared ? SeparationVerdict::infinity() : SeparationVerdict::delta();

  d.U_simplified = detail::simplify_hit(d.U, a1, b1);
  d.V_simplified = detail::simplify_hit(d.V, b1, a1);
  SeparationVerdict v = detail::time_min(detail::time_min(d.U_simplified, d.V_simplified), d.R);
  d.verdict = d.canonical_swap ? detail::exchange_endpoints(v) : v;
  return d;
}

inline SeparationVerdict separating_time(const MutSelParams& p0, const MutSelParams& p1) {
  return separating_time_diagnostic(p0, p1).verdict;
}

enum class PointVerdict { NonSeparating, Separating };
enum class IntegrabilityVerdict { Converges, Diverges };

inline const char* to_string(PointVerdict v) {
  return v == PointVerdict::NonSeparating ? "NonSeparating" : "Separating";
}
inline const char* to_string(IntegrabilityVerdict v) {
  return v == IntegrabilityVerdict::Converges ? "Converges" : "Diverges";
}

struct ShellReport {
  std::vector<double> shells;  // integral over each nested shell / neighbourhood
  std::vector<double> ratios;  // shells[k+1] / shells[k]
};

// Local integrability of (mu1 - mu0)^2 / sigma^4 at an interior point z, over
// the neighbourhoods (z - r_k, z + r_k) with r_k = 2^-k r_0. On an interior
// point the integrand is bounded, so the neighbourhood integrals shrink like r.
inline PointVerdict interior_point_check(const MutSelParams& p0, const MutSelParams& p1, const EtaSpec& eta, double z,
                                         ShellReport* report = nullptr) {
  if (!(z > 0.0 && z < 1.0)) throw InvalidArgument("interior_point_check needs z in (0,1)");
  auto f = [&](double x) {
    const double b = drift_gap_over_sigma(p1, p0, eta, x);
    return b * b / (x * (1.0 - x));
  };
  const double r0 = 0.5 * std::min(z, 1.0 - z);
  ShellReport rep;
  for (int k = 0; k < 12; ++k) {
    const double r = std::ldexp(r0, -k);
    rep.shells.push_back(quad::integrate_gauss(f, z - r, z + r, "interior integrability"));
  }
  bool ok = true;
  for (std::size_t k = 0; k + 1 < rep.shells.size(); ++k) {
    if (!std::isfinite(rep.shells[k])) ok = false;
    if (rep.shells[k] > 0.0) {
      const double q = rep.shells[k + 1] / rep.shells[k];
      rep.ratios.push_back(q);
      if (q > 0.75) ok = false;
    }
  }
  if (report) *report = std::move(rep);
  return ok ? PointVerdict::NonSeparating : PointVerdict::Separating;
}

struct HalfGoodOptions {
  double epsilon = 0.25;
  int shells = 12;
  int tail = 6;
  double diverge_ratio = 0.5;
  double converge_ratio = 0.45;
  double tol = 1e-11;
};

// Integrability near an endpoint of
//   |S_1(y) - S_1(0)| * y^{a1} (1-y)^{b1} e^{s1 H(y)} * (db/(1-y) - da/y - ds eta(y))^2,
// deltas taken as p0 - p1. Integrated over dyadic shells (2^-k-1 eps, 2^-k eps):
// a log-divergent tail gives shell ratios near 1, a convergent one near 1/4.
inline IntegrabilityVerdict half_good_check(const MutSelParams& p0_in, const MutSelParams& p1_in, int endpoint,
                                            const EtaSpec& eta_in = EtaSpec::genic(),
                                            const HalfGoodOptions& opt = {}, ShellReport* report = nullptr) {
  if (endpoint != 0 && endpoint != 1) throw InvalidArgument("endpoint must be 0 or 1");
  MutSelParams p0 = p0_in, p1 = p1_in;
  EtaSpec eta = eta_in;
  if (endpoint == 1) {
    // Mirror x -> 1-x: rates swap and the selection shape becomes -eta(1-x).
    p0 = p0.swapped();
    p1 = p1.swapped();
    eta = eta.mirrored();
  }
  // S_1(0+) = -inf: condition (b) of half-goodness already fails.
  if (p1.alpha >= 1.0) return IntegrabilityVerdict::Diverges;
  const double da = p0.alpha - p1.alpha, db = p0.beta - p1.beta, ds = p0.s - p1.s;
  auto integrand = [&](double y) {
    const double inner = scale_from_zero(p1, eta, y, 1e-13).value();
    const double w = std::exp(p1.alpha * std::log(y) + p1.beta * std::log1p(-y) + p1.s * eta.H(y));
    const double g = db / (1.0 - y) - da / y - ds * eta.eta(y);
    return inner * w * g * g;
  };
  ShellReport rep;
  for (int k = 0; k < opt.shells; ++k) {
    const double hi = std::ldexp(opt.epsilon, -k), lo = 0.5 * hi;
    // In log y the shell integrand is y * f(y), smooth and bounded.
    rep.shells.push_back(quad::integrate(
        [&](double v) {
          const double y = std::exp(v);
          return y * integrand(y);
        },
        std::log(lo), std::log(hi), opt.tol, "half-good shell"));
  }
  bool all_zero = true;
  for (double s : rep.shells) all_zero = all_zero && s == 0.0;
  if (all_zero) {
    if (report) *report = std::move(rep);
    return IntegrabilityVerdict::Converges;
  }
  for (std::size_t k = 0; k + 1 < rep.shells.size(); ++k) rep.ratios.push_back(rep.shells[k + 1] / rep.shells[k]);
  const std::size_t n = rep.ratios.size();
  const std::size_t from = n - static_cast<std::size_t>(opt.tail);
  bool diverge = true, converge = true;
  for (std::size_t k = from; k < n; ++k) {
    diverge = diverge && rep.ratios[k] > opt.diverge_ratio;
    converge = converge && rep.ratios[k] <= opt.converge_ratio;
  }
  if (report) *report = rep;
  if (diverge) return IntegrabilityVerdict::Diverges;
  if (converge) return IntegrabilityVerdict::Converges;
  throw Inconclusive("half_good_check: shell ratios match neither a logarithmic nor a power tail");
}

}  // namespace wfsep
