#include <cmath>

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <gtest/gtest.h>

#include "wfsep/model.hpp"

using namespace wfsep;

TEST(Model, BoundaryClassesFollowTheLocalRate) {
  EXPECT_EQ(classify_boundary({0.5, 2.0, 0.0}).at0, BoundaryClass::RegularReflecting);
  EXPECT_EQ(classify_boundary({0.0, 2.0, 0.0}).at0, BoundaryClass::Exit);
  EXPECT_EQ(classify_boundary({1.0, 2.0, 0.0}).at0, BoundaryClass::Entrance);
  EXPECT_EQ(classify_boundary({1.0, 2.0, 0.0}).at1, BoundaryClass::Entrance);
  const auto r = classify_boundary({0.3, 1.0, 0.0});
  EXPECT_TRUE(r.contains0);
  EXPECT_FALSE(r.contains1);
}

TEST(Model, RejectsInvalidParameters) {
  EXPECT_THROW(MutSelParams(-0.1, 1.0, 0.0), InvalidArgument);
  EXPECT_THROW(MutSelParams(1.0, -1.0, 0.0), InvalidArgument);
  EXPECT_THROW(MutSelParams(1.0, 1.0, NAN), InvalidArgument);
  EXPECT_THROW(EtaSpec::polynomial({0.0, 0.0}), InvalidArgument);
  EXPECT_THROW(EtaSpec::polynomial({}), InvalidArgument);
}

TEST(Model, DriftHandValues) {
  EXPECT_DOUBLE_EQ(drift({1, 1, 0}, EtaSpec::genic(), 0.5), 0.0);
  EXPECT_DOUBLE_EQ(drift({2, 0, 0}, EtaSpec::genic(), 0.25), 0.75);
  EXPECT_DOUBLE_EQ(drift({0, 0, 1}, EtaSpec::genic(), 0.5), 0.125);
  EXPECT_DOUBLE_EQ(diffusion(0.5), 0.5);
}

TEST(Model, DriftGapOverSigma) {
  const EtaSpec g = EtaSpec::genic();
  for (double x : {0.1, 0.5, 0.9}) EXPECT_DOUBLE_EQ(drift_gap_over_sigma({1, 2, 3}, {1, 2, 3}, g, x), 0.0);
  EXPECT_DOUBLE_EQ(drift_gap_over_sigma({1, 0, 0}, {0, 0, 0}, g, 0.5), 0.5);
  EXPECT_DOUBLE_EQ(drift_gap_over_sigma({0, 0, 2}, {0, 0, 0}, g, 0.5), 0.5);
  EXPECT_THROW(drift_gap_over_sigma({1, 0, 0}, {0, 0, 0}, g, 0.0), InvalidArgument);
  // Matches (mu1 - mu0) / sigma evaluated from the drift itself.
  const MutSelParams p1(0.7, 1.3, -2.0), p0(0.2, 0.4, 1.5);
  const EtaSpec d = EtaSpec::diploid(0.3);
  for (double x : {0.05, 0.3, 0.77})
    EXPECT_NEAR(drift_gap_over_sigma(p1, p0, d, x), (drift(p1, d, x) - drift(p0, d, x)) / diffusion(x), 1e-14);
}

TEST(Model, EtaVariantsAndAntiderivative) {
  const EtaSpec d = EtaSpec::diploid(0.2);
  EXPECT_DOUBLE_EQ(d.eta(0.5), 0.5);
  EXPECT_DOUBLE_EQ(d.eta(0.0), 0.2);
  const EtaSpec p = EtaSpec::polynomial({1.0, -2.0, 3.0});
  for (const EtaSpec& e : {EtaSpec::genic(), d, p}) {
    EXPECT_EQ(e.H(0.0), 0.0);
    // H' = eta and eta' by central differences.
    for (double x : {0.1, 0.4, 0.8}) {
      const double h = 1e-5;
      EXPECT_NEAR((e.H(x + h) - e.H(x - h)) / (2 * h), e.eta(x), 1e-8);
      EXPECT_NEAR((e.eta(x + h) - e.eta(x - h)) / (2 * h), e.eta_prime(x), 1e-8);
    }
  }
}

TEST(Model, MirrorSymmetryOfDrift) {
  const MutSelParams p(0.4, 1.7, 2.5);
  for (const EtaSpec& e : {EtaSpec::genic(), EtaSpec::diploid(0.3), EtaSpec::polynomial({0.5, 1.0, -1.0})}) {
    const EtaSpec m = e.mirrored();
    for (double x : {0.0, 0.2, 0.5, 0.9, 1.0}) {
      EXPECT_NEAR(m.eta(x), -e.eta(1.0 - x), 1e-14);
      EXPECT_NEAR(drift(p, e, x), -drift(p.swapped(), m, 1.0 - x), 1e-14);
    }
  }
  const auto a = classify_boundary({0.0, 1.5, 0.0});
  const auto b = classify_boundary(MutSelParams(0.0, 1.5, 0.0).swapped());
  EXPECT_EQ(a.at0, b.at1);
  EXPECT_EQ(a.at1, b.at0);
}

TEST(Model, ScaleFunctionNeutralSymmetric) {
  const MutSelParams p(1, 1, 0);
  const EtaSpec g = EtaSpec::genic();
  EXPECT_EQ(scale(p, g, 0.5), 0.0);
  EXPECT_NEAR(scale(p, g, 0.75) - scale(p, g, 0.25), 2.0 * std::log(3.0), 1e-12);
  for (double x : {1e-6, 0.01, 0.3, 0.9, 1 - 1e-6}) EXPECT_NEAR(scale(p, g, x), std::log(x / (1 - x)), 1e-10);
}

TEST(Model, SpeedDensityAndAtoms) {
  EXPECT_DOUBLE_EQ(speed_density({0, 0, 0}, EtaSpec::genic(), 0.5), 4.0);
  EXPECT_TRUE(speed_atom({0, 1, 0}, 0).is_pos_inf());
  EXPECT_EQ(speed_atom({0.5, 1, 0}, 0), ExtendedReal(0.0));
  EXPECT_TRUE(speed_atom({0.5, 0, 0}, 1).is_pos_inf());
}

TEST(Model, ScaleTimesSpeedIdentity) {
  // S'(x) m(x) x(1-x) = 1 pointwise.
  for (const MutSelParams& p : {MutSelParams(0.3, 0.6, 1.0), MutSelParams(2.0, 0.5, -3.0), MutSelParams(0, 0, 0)}) {
    const EtaSpec e = EtaSpec::diploid(0.25);
    for (double x : {0.05, 0.3, 0.6, 0.95}) {
      const double h = 1e-5;
      const double ds = (scale(p, e, x + h) - scale(p, e, x - h)) / (2 * h);
      EXPECT_NEAR(ds * speed_density(p, e, x) * x * (1 - x), 1.0, 1e-6);
    }
  }
}

TEST(Model, ScaleAnchorIndependentDifferences) {
  // Differences do not depend on where the integral is anchored.
  const MutSelParams p(0.4, 0.8, 1.2);
  const EtaSpec e = EtaSpec::genic();
  const double direct = quad::integrate([&](double y) { return scale_density(p, e, y); }, 0.2, 0.7, 1e-13);
  EXPECT_NEAR(scale(p, e, 0.7) - scale(p, e, 0.2), direct, 1e-11);
  // scale_from_zero is S(x) - S(0+).
  EXPECT_NEAR(scale_from_zero(p, e, 0.7).value() - scale_from_zero(p, e, 0.2).value(), direct, 1e-11);
  EXPECT_TRUE(scale_from_zero({1.0, 0.5, 0}, e, 0.3).is_pos_inf());
}

TEST(Model, StationarySigmaClosedFormTwoTwo) {
  const Eigen::Matrix3d S = stationary_sigma_neutral_closed_form(2, 2);
  Eigen::Matrix3d E;
  E << 2, -1, 0.5, -1, 2, -0.5, 0.5, -0.5, 0.2;
  EXPECT_LT((S - E).cwiseAbs().maxCoeff(), 1e-15);
  const auto m = stationary_moments({2, 2, 0}, EtaSpec::genic());
  EXPECT_LT((m.sigma - E).cwiseAbs().maxCoeff(), 1e-8);
}

TEST(Model, StationaryMomentsMatchBetaMoments) {
  // Beta(3,2): E[(1-X)/X] = b/(a-1), E[X/(1-X)] = a/(b-1), E[1-X] = b/(a+b),
  // E[X(1-X)] = ab/((a+b)(a+b+1)).
  const auto m = stationary_moments({3, 2, 0}, EtaSpec::genic());
  EXPECT_NEAR(m.a_inf.value(), 1.0, 1e-8);
  EXPECT_NEAR(m.b_inf.value(), 3.0, 1e-8);
  EXPECT_NEAR(m.c_inf.value(), 0.4, 1e-8);
  EXPECT_NEAR(m.d_inf.value(), 0.6, 1e-8);
  EXPECT_NEAR(m.e_inf.value(), 6.0 / 30.0, 1e-8);
  EXPECT_LT((m.sigma - stationary_sigma_neutral_closed_form(3, 2)).cwiseAbs().maxCoeff(), 1e-8);
  // Non-integer rates, including a singular density at 0.
  const auto n = stationary_moments({1.3, 0.7, 0}, EtaSpec::genic());
  EXPECT_NEAR(n.a_inf.value(), 0.7 / 0.3, 1e-8);
  EXPECT_NEAR(n.c_inf.value(), 0.35, 1e-8);
  EXPECT_TRUE(n.b_inf.is_pos_inf());
}

TEST(Model, StationaryInfiniteAndErgodicityErrors) {
  const auto m = stationary_moments({1, 2, 0}, EtaSpec::genic());
  EXPECT_TRUE(m.a_inf.is_pos_inf());
  EXPECT_FALSE(m.finite());
  EXPECT_THROW(stationary_moments({0, 2, 0}, EtaSpec::genic()), InvalidArgument);
  EXPECT_THROW(stationary_moments({1, 0, 0}, EtaSpec::genic()), InvalidArgument);
}

TEST(Model, SigmaSymmetricPositiveSemidefinite) {
  for (const MutSelParams& p : {MutSelParams(2, 2, 0), MutSelParams(1.5, 3, 2), MutSelParams(4, 1.2, -1)}) {
    const auto m = stationary_moments(p, EtaSpec::diploid(0.7));
    EXPECT_LT((m.sigma - m.sigma.transpose()).cwiseAbs().maxCoeff(), 1e-15);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(m.sigma);
    EXPECT_GE(es.eigenvalues().minCoeff(), -1e-10);
  }
}

TEST(Model, SelectionTiltedMomentsByDirectQuadrature) {
  // Oracle: plain Gauss-Kronrod on a case where every integrand is smooth on [0,1].
  const MutSelParams p(3.0, 4.0, 1.7);
  const EtaSpec e = EtaSpec::polynomial({0.2, 0.9});
  auto dens = [&](double x) { return speed_density(p, e, x); };
  using GK = boost::math::quadrature::gauss_kronrod<double, 61>;
  const double Z = GK::integrate(dens, 0.0, 1.0, 15, 1e-14);
  const double a = GK::integrate([&](double x) { return dens(x) * (1 - x) / x; }, 0.0, 1.0, 15, 1e-14) / Z;
  const double ee = GK::integrate([&](double x) { return dens(x) * x * (1 - x) * e.eta(x) * e.eta(x); }, 0.0, 1.0, 15,
                                  1e-14) / Z;
  const auto m = stationary_moments(p, e);
  EXPECT_NEAR(m.a_inf.value(), a, 1e-9);
  EXPECT_NEAR(m.e_inf.value(), ee, 1e-9);
}
