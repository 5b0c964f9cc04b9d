#include <gtest/gtest.h>

#include <cmath>
#include <numeric>

#include "wfsep/likelihood.hpp"
#include "wfsep/separating.hpp"

using namespace wfsep;

namespace {

SamplePath constant_path(double x, double T, std::size_t n = 100) {
  SamplePath p;
  for (std::size_t i = 0; i <= n; ++i) {
    p.times.push_back(T * static_cast<double>(i) / static_cast<double>(n));
    p.values.push_back(x);
  }
  p.times.back() = T;
  return p;
}

SamplePath sim(const MutSelParams& p, double x0, double T, std::uint64_t seed, double dt = 1e-3) {
  SimConfig c;
  c.seed = seed;
  c.dt = dt;
  return simulate_wf(p, EtaSpec::genic(), x0, T, c);
}

SamplePath subsample(const SamplePath& p, std::size_t stride) {
  SamplePath q;
  for (std::size_t i = 0; i < p.size(); i += stride) {
    q.times.push_back(p.times[i]);
    q.values.push_back(p.values[i]);
  }
  return q;
}

}  // namespace

TEST(PathFunctionals, ConstantHalfPath) {
  const auto f = path_functionals(constant_path(0.5, 1.0), EtaSpec::genic());
  EXPECT_NEAR(f.A.value(), 1.0, 1e-14);
  EXPECT_NEAR(f.B.value(), 1.0, 1e-14);
  EXPECT_NEAR(f.C, 0.5, 1e-14);
  EXPECT_NEAR(f.D, 0.5, 1e-14);
  EXPECT_NEAR(f.E, 0.25, 1e-14);
  EXPECT_EQ(f.T, 1.0);
  EXPECT_EQ(f.log_ratio_x->value(), 0.0);
  EXPECT_EQ(f.H_diff, 0.0);
}

TEST(PathFunctionals, ConstantPathHasABEqualTSquared) {
  for (double x : {0.01, 0.3, 0.77}) {
    const auto f = path_functionals(constant_path(x, 2.5, 64), EtaSpec::genic());
    EXPECT_NEAR(f.A.value() * f.B.value(), 2.5 * 2.5, 1e-12);
  }
}

TEST(PathFunctionals, BoundsInTermsOfEta) {
  const EtaSpec eta = EtaSpec::diploid(0.2);
  for (std::uint64_t s = 0; s < 5; ++s) {
    const auto path = simulate_wf({1, 1.5, 3}, eta, 0.4, 2.0, SimConfig{.seed = s});
    const auto f = path_functionals(path, eta);
    const double m = eta.sup_abs();
    EXPECT_GE(f.A.value(), 0.0);
    EXPECT_GE(f.B.value(), 0.0);
    EXPECT_LE(std::abs(f.C), f.T * m + 1e-12);
    EXPECT_LE(std::abs(f.D), f.T * m + 1e-12);
    EXPECT_GE(f.E, 0.0);
    EXPECT_LE(f.E, f.T * m * m / 4 + 1e-12);
  }
}

TEST(PathFunctionals, HitMakesAInfinite) {
  int seen = 0;
  for (std::uint64_t s = 0; s < 20 && seen < 3; ++s) {
    const auto p = sim({0.3, 1, 0}, 0.02, 2.0, s);
    if (!p.hit0) continue;
    ++seen;
    const auto f = path_functionals(p, EtaSpec::genic());
    EXPECT_FALSE(f.A.finite());
    EXPECT_TRUE(f.B.finite());
    // Just before the hit the sum is still an ordinary number.
    const auto g = path_functionals(truncate(p, 0.5 * *p.hit0), EtaSpec::genic());
    EXPECT_TRUE(g.A.finite());
  }
  EXPECT_GT(seen, 0);
}

TEST(PathFunctionals, EndpointLogsAreFlaggedNotThrown) {
  SamplePath p = constant_path(0.5, 1.0, 4);
  p.values.back() = 0.0;
  p.hit0 = 1.0;
  const auto f = path_functionals(p, EtaSpec::genic());
  ASSERT_TRUE(f.log_ratio_x.has_value());
  EXPECT_EQ(f.log_ratio_x->kind(), ExtendedReal::Kind::NegInf);
  p.values.front() = 0.0;
  const auto g = path_functionals(p, EtaSpec::genic());
  EXPECT_FALSE(g.log_ratio_x.has_value());
}

TEST(LogLikelihood, ZeroAtDominatingParameter) {
  const auto path = sim({2, 2, 1}, 0.5, 1.0, 3);
  const auto f = path_functionals(path, EtaSpec::genic());
  const MutSelParams p(2, 2, 1);
  const auto v = log_likelihood(p, p, EtaSpec::genic(), f);
  EXPECT_FALSE(v.separated);
  EXPECT_EQ(v.value, 0.0);
}

TEST(LogLikelihood, ConstantHalfPathHandValue) {
  const auto f = path_functionals(constant_path(0.5, 1.0), EtaSpec::genic());
  const auto v = log_likelihood({1, 1, 0}, {0, 0, 0}, EtaSpec::genic(), f);
  EXPECT_NEAR(v.value, 0.5, 1e-13);
}

TEST(LogLikelihood, SelectionOnlyMatchesDirectRoute) {
  for (const EtaSpec& eta : {EtaSpec::genic(), EtaSpec::diploid(0.8), EtaSpec::polynomial({0.5, -2, 1})}) {
    for (std::uint64_t s = 0; s < 6; ++s) {
      SimConfig c;
      c.seed = 50 + s;
      const auto path = simulate_wf({1.5, 2, 1}, eta, 0.4, 3.0, c);
      const auto f = path_functionals(path, eta);
      const double l = log_likelihood({1.5, 2, 2.5}, {1.5, 2, -0.5}, eta, f).value;
      const double r = selection_rnd(path, eta, 1.5, 2, 2.5, -0.5);
      EXPECT_NEAR(l, r, 1e-10 * std::max(1.0, std::abs(r)));
    }
  }
}

TEST(SelectionRnd, HandValueAndAntisymmetry) {
  const auto p = constant_path(0.5, 1.0);
  EXPECT_EQ(selection_rnd(p, EtaSpec::genic(), 0, 0, 1, 1), 0.0);
  EXPECT_NEAR(selection_rnd(p, EtaSpec::genic(), 0, 0, 1, 0), -0.03125, 1e-14);
  const auto path = sim({1, 1, 2}, 0.3, 2.0, 8);
  const double ab = selection_rnd(path, EtaSpec::genic(), 1, 1, 2, -1);
  const double ba = selection_rnd(path, EtaSpec::genic(), 1, 1, -1, 2);
  EXPECT_NEAR(ab, -ba, 1e-12 * std::max(1.0, std::abs(ab)));
}

TEST(LogLikelihood, ChainRule) {
  const EtaSpec eta = EtaSpec::diploid(0.3);
  const auto path = simulate_wf({1.2, 1.7, 2}, eta, 0.6, 4.0, SimConfig{.seed = 4});
  const auto f = path_functionals(path, eta);
  const MutSelParams t0(1, 1.5, 0), t1(2, 0.8, 3), t2(0.4, 3, -2);
  const double l20 = log_likelihood(t2, t0, eta, f).value;
  const double l21 = log_likelihood(t2, t1, eta, f).value;
  const double l10 = log_likelihood(t1, t0, eta, f).value;
  EXPECT_NEAR(l20, l21 + l10, 1e-10 * std::max(1.0, std::abs(l20)));
}

TEST(LogLikelihood, OnlyHDifferencesEnter) {
  const EtaSpec eta = EtaSpec::polynomial({1, 1});
  const auto path = simulate_wf({1.2, 1.7, 2}, eta, 0.6, 2.0, SimConfig{.seed = 5});
  auto f = path_functionals(path, eta);
  const double c = 7.25;
  const double shifted = (eta.H(f.xT) + c) - (eta.H(f.x0) + c);
  const double base = log_likelihood({0, 0, 1}, {0, 0, 0}, eta, f).value;
  f.H_diff = shifted;
  EXPECT_NEAR(log_likelihood({0, 0, 1}, {0, 0, 0}, eta, f).value, base, 1e-12);
}

TEST(PathFunctionals, RefinementErrorIsFirstOrder) {
  // Fine interior-staying paths read at strides 8, 4, 2, 1; the change per
  // halving is a zero-mean O(h) quantity, so its RMS over paths is compared.
  const std::vector<std::size_t> strides = {8, 4, 2, 1};
  std::vector<double> msA(3, 0.0), msE(3, 0.0);
  int used = 0;
  for (std::uint64_t s = 0; s < 30; ++s) {
    const auto fine = sim({4, 4, 0}, 0.5, 1.0, 100 + s, 1e-5);
    if (fine.hit0 || fine.hit1) continue;
    ++used;
    std::vector<double> A, E;
    for (std::size_t stride : strides) {
      const auto f = path_functionals(subsample(fine, stride), EtaSpec::genic());
      A.push_back(f.A.value());
      E.push_back(f.E);
    }
    for (std::size_t k = 0; k < 3; ++k) {
      msA[k] += (A[k] - A[k + 1]) * (A[k] - A[k + 1]);
      msE[k] += (E[k] - E[k + 1]) * (E[k] - E[k + 1]);
    }
  }
  ASSERT_GT(used, 20);
  for (const auto* ms : {&msA, &msE}) {
    std::vector<double> lx, ly;
    for (std::size_t k = 0; k < 3; ++k) {
      lx.push_back(std::log(static_cast<double>(strides[k])));
      ly.push_back(0.5 * std::log((*ms)[k]));
    }
    const double mx = std::accumulate(lx.begin(), lx.end(), 0.0) / 3.0;
    const double my = std::accumulate(ly.begin(), ly.end(), 0.0) / 3.0;
    double num = 0, den = 0;
    for (std::size_t k = 0; k < 3; ++k) {
      num += (lx[k] - mx) * (ly[k] - my);
      den += (lx[k] - mx) * (lx[k] - mx);
    }
    EXPECT_GE(num / den, 0.8);
  }
}

TEST(LogLikelihood, SeparatedAfterTheSeparatingHit) {
  const MutSelParams p0(0.2, 0.5, 0), p1(0.7, 0.5, 0);
  ASSERT_EQ(separating_time(p0, p1), SeparationVerdict::hit0(false));
  int checked = 0;
  for (std::uint64_t s = 0; s < 30 && checked < 3; ++s) {
    SimConfig c;
    c.seed = s;
    c.stop_on_hit = false;
    const auto path = simulate_wf(p0, EtaSpec::genic(), 0.05, 3.0, c);
    if (!path.hit0) continue;
    ++checked;
    const auto after = log_likelihood(p1, p0, EtaSpec::genic(), path_functionals(path, EtaSpec::genic()));
    EXPECT_TRUE(after.separated);
    const auto before =
        log_likelihood(p1, p0, EtaSpec::genic(), path_functionals(truncate(path, 0.9 * *path.hit0), EtaSpec::genic()));
    EXPECT_FALSE(before.separated);
    EXPECT_TRUE(std::isfinite(before.value));
  }
  EXPECT_GT(checked, 0);
}

TEST(InformationMatrix, LayoutAndSymmetry) {
  const auto f = path_functionals(constant_path(0.25, 2.0), EtaSpec::genic());
  const auto I = information_matrix(f);
  EXPECT_NEAR(I(0, 0), 0.25 * 6.0, 1e-13);
  EXPECT_NEAR(I(0, 1), -0.5, 1e-15);
  EXPECT_TRUE(I.isApprox(I.transpose()));
}
