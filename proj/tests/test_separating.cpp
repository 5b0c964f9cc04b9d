#include <set>
#include <vector>

#include <gtest/gtest.h>

#include "oracles/table_oracle.hpp"
#include "wfsep/separating.hpp"

using namespace wfsep;

namespace {

std::vector<std::pair<MutSelParams, MutSelParams>> grid_pairs() {
  const std::vector<double> rates{0.0, 0.3, 0.5, 1.0, 1.5};
  const std::vector<double> sel{-1.0, 0.0, 1.0};
  std::vector<std::pair<MutSelParams, MutSelParams>> out;
  for (double a0 : rates)
    for (double b0 : rates)
      for (double a1 : rates)
        for (double b1 : rates)
          for (double s0 : sel)
            for (double s1 : sel) out.push_back({MutSelParams(a0, b0, s0), MutSelParams(a1, b1, s1)});
  return out;
}

SeparationVerdict swap_ends(SeparationVerdict v) {
  if (v.kind == VerdictKind::HitZero)
    v.kind = VerdictKind::HitOne;
  else if (v.kind == VerdictKind::HitOne)
    v.kind = VerdictKind::HitZero;
  return v;
}

}  // namespace

TEST(SeparatingPoints, EndpointRule) {
  EXPECT_TRUE(separating_points({0.5, 0.5, 0}, {0.5, 0.5, 1}).empty());
  const auto a = separating_points({0.2, 0.5, 0}, {0.7, 0.5, 0});
  EXPECT_TRUE(a.zero);
  EXPECT_FALSE(a.one);
  const auto b = separating_points({1.5, 0.5, 0}, {1.5, 0.5, 1});
  EXPECT_TRUE(b.zero);
  EXPECT_FALSE(b.one);
}

TEST(SeparatingPoints, SymmetricInArguments) {
  for (const auto& [p0, p1] : grid_pairs()) EXPECT_EQ(separating_points(p0, p1), separating_points(p1, p0));
}

TEST(SeparatingTime, SpecificCases) {
  EXPECT_EQ(separating_time({0.5, 0.8, 0}, {0.5, 0.8, 0}), SeparationVerdict::delta());
  EXPECT_EQ(separating_time({0.5, 0.8, 1}, {0.5, 0.8, 0}), SeparationVerdict::infinity());
  EXPECT_EQ(separating_time({0.9, 1.5, 0}, {0.4, 1.5, 0}), SeparationVerdict::hit0(false));
  EXPECT_EQ(separating_time({1.5, 0.9, 0}, {1.5, 0.4, 0}), SeparationVerdict::hit1(false));
  EXPECT_EQ(separating_time({0, 0.8, 0}, {0, 0.5, 0}), SeparationVerdict::hit1(true));
  EXPECT_EQ(separating_time({0.2, 0.5, 0}, {0.7, 0.5, 0}), SeparationVerdict::hit0(false));
}

TEST(SeparatingTime, MatchesEveryTableRowOnGrid) {
  std::set<int> rows;
  std::size_t n = 0;
  for (const auto& [p0, p1] : grid_pairs()) {
    const auto row = oracle::lookup(p0, p1);
    ASSERT_TRUE(row.has_value()) << "no table row for p0=(" << p0.alpha << "," << p0.beta << "," << p0.s << ") p1=("
                                 << p1.alpha << "," << p1.beta << "," << p1.s << ")";
    rows.insert(row->row);
    EXPECT_EQ(separating_time(p0, p1), row->S) << "row " << row->row;
    ++n;
  }
  EXPECT_GE(n, 300u);
  EXPECT_EQ(rows.size(), 14u) << [&] { std::string m; for (int r : rows) m += std::to_string(r) + " "; return m; }();
}

TEST(SeparatingTime, TablePointSetUpToTheEqualRatesConvention) {
  for (const auto& [p0, p1] : grid_pairs()) {
    const auto row = oracle::lookup(p0, p1);
    ASSERT_TRUE(row);
    const auto A = separating_points(p0, p1);
    // Equal rates >= 1 count as separating by convention; the table omits
    // that point in some rows without changing the verdict.
    const bool conv0 = p0.alpha == p1.alpha && p0.alpha >= 1, conv1 = p0.beta == p1.beta && p0.beta >= 1;
    if (row->row == 1) continue;
    EXPECT_EQ(A.zero, row->A0 || conv0) << "row " << row->row;
    EXPECT_EQ(A.one, row->A1 || conv1) << "row " << row->row;
  }
}

TEST(SeparatingTime, InvolutionSwapsEndpoints) {
  for (const auto& [p0, p1] : grid_pairs())
    EXPECT_EQ(separating_time(p0.swapped(), p1.swapped()), swap_ends(separating_time(p0, p1)));
}

TEST(SeparatingTime, VerdictNeedNotBeSymmetric) {
  // Rows (x) and (vi): the same pair of measures, stated under each of them.
  const MutSelParams a(0, 1.5, 0), b(0, 0.5, 0);
  EXPECT_EQ(separating_time(b, a), SeparationVerdict::delta());
  EXPECT_EQ(separating_time(a, b), SeparationVerdict::hit1(true));
}

TEST(SeparatingTime, SharedReflectingRatesWithDifferentSelectionGiveInfinity) {
  for (double a : {0.1, 0.5, 0.9})
    for (double b : {0.2, 0.7})
      EXPECT_EQ(separating_time({a, b, 0.0}, {a, b, 2.0}), SeparationVerdict::infinity());
}

TEST(SeparatingTime, DiagnosticFollowsTheConstruction) {
  // Row (ix): U = T_0, V = T_1 simplified to infinity, R = delta.
  const auto d = separating_time_diagnostic({0.9, 2.0, 0}, {0.4, 1.5, 0});
  EXPECT_EQ(d.U, SeparationVerdict::hit0(false));
  EXPECT_EQ(d.V, SeparationVerdict::hit1(false));
  EXPECT_EQ(d.V_simplified, SeparationVerdict::infinity());
  EXPECT_EQ(d.R, SeparationVerdict::delta());
  EXPECT_EQ(d.verdict, SeparationVerdict::hit0(false));
  // Row (v): beta1 = 0, so U carries the bar.
  const auto e = separating_time_diagnostic({0.5, 0, 0}, {0, 0, 0});
  EXPECT_EQ(e.U, SeparationVerdict::hit0(true));
  EXPECT_EQ(e.verdict, SeparationVerdict::hit0(true));
  // Canonicalisation swap recorded when alpha1 > beta1.
  EXPECT_TRUE(separating_time_diagnostic({1.5, 0.9, 0}, {1.5, 0.4, 0}).canonical_swap);
}

TEST(InteriorPoint, AlwaysNonSeparating) {
  const EtaSpec g = EtaSpec::genic();
  EXPECT_EQ(interior_point_check({0.2, 1, 0}, {0.9, 1, 0}, g, 0.5), PointVerdict::NonSeparating);
  EXPECT_EQ(interior_point_check({1, 1, 1}, {1, 1, 1}, g, 0.3), PointVerdict::NonSeparating);
  EXPECT_EQ(interior_point_check({0.2, 1, 0}, {0.9, 1, 0}, g, 0.01), PointVerdict::NonSeparating);
  EXPECT_EQ(interior_point_check({0, 0, -3}, {2, 0.1, 4}, EtaSpec::diploid(0.1), 0.999), PointVerdict::NonSeparating);
  EXPECT_THROW(interior_point_check({0, 0, 0}, {1, 0, 0}, g, 0.0), InvalidArgument);
}

TEST(HalfGood, HandCases) {
  EXPECT_EQ(half_good_check({0.5, 1, 0}, {0.5, 1, 0}, 0), IntegrabilityVerdict::Converges);
  EXPECT_EQ(half_good_check({0.3, 1, 0}, {0.5, 1, 0}, 0), IntegrabilityVerdict::Diverges);
  EXPECT_EQ(half_good_check({0.4, 0.9, 1}, {0.3, 0.9, 0}, 1), IntegrabilityVerdict::Converges);
  // alpha1 >= 1: S(0+) = -inf, so the condition fails regardless of the integral.
  EXPECT_EQ(half_good_check({1.5, 1, 0}, {1.5, 1, 0}, 0), IntegrabilityVerdict::Diverges);
}

TEST(HalfGood, ShellRatiosShowTheTwoRegimes) {
  ShellReport r;
  half_good_check({0.3, 0.6, 0}, {0.5, 0.6, 0}, 0, EtaSpec::genic(), {}, &r);
  EXPECT_NEAR(r.ratios.back(), 1.0, 0.01);
  half_good_check({0.5, 0.2, 1.0}, {0.5, 0.6, -1.0}, 0, EtaSpec::genic(), {}, &r);
  EXPECT_NEAR(r.ratios.back(), 0.25, 0.01);
}

TEST(HalfGood, AgreesWithAnalyticRuleOnRateGrid) {
  for (int i = 1; i <= 9; ++i)
    for (int j = 1; j <= 9; ++j) {
      const double a0 = i / 10.0, a1 = j / 10.0;
      const auto v = half_good_check({a0, 0.7, 0.5}, {a1, 0.4, -0.5}, 0, EtaSpec::diploid(0.3));
      EXPECT_EQ(v, a0 == a1 ? IntegrabilityVerdict::Converges : IntegrabilityVerdict::Diverges) << a0 << " " << a1;
      const auto w = half_good_check({0.7, a0, 0.5}, {0.4, a1, -0.5}, 1, EtaSpec::diploid(0.3));
      EXPECT_EQ(w, a0 == a1 ? IntegrabilityVerdict::Converges : IntegrabilityVerdict::Diverges) << a0 << " " << a1;
    }
}
