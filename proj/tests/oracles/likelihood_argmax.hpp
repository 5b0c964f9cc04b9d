#pragma once

// Numeric argmax of the quadratic log-likelihood, for comparison with the
// closed-form estimators.

#include <Eigen/Dense>

#include "oracles/nelder_mead.hpp"
#include "wfsep/likelihood.hpp"

namespace oracle {

inline double loglik(const Eigen::Vector3d& th, const wfsep::PathFunctionals& f,
                     const Eigen::Vector3d& centre = Eigen::Vector3d::Zero()) {
  // Only the algebra of the form is used here, so the centre may leave the domain.
  wfsep::MutSelParams p0;
  p0.alpha = centre(0);
  p0.beta = centre(1);
  p0.s = centre(2);
  return wfsep::log_likelihood_form(th, p0, f).value;
}

// Nelder-Mead, then again with the dominating measure moved to the first
// answer: the form changes by a constant, but it is no longer a small
// difference of large numbers near the optimum.
template <class Embed>
Vec argmax(Embed embed, const wfsep::PathFunctionals& f, Vec start) {
  auto stage = [&](const Eigen::Vector3d& centre, Vec from) {
    return nelder_mead([&](const Vec& v) { return -loglik(embed(v), f, centre); }, from);
  };
  const Vec x1 = stage(Eigen::Vector3d::Zero(), start);
  return stage(embed(x1), x1);
}

}  // namespace oracle
