// Walk through the library on one pair of models: which endpoints separate
// them, when, and what a single observed path says about the parameters.

#include <iostream>

#include "wfsep/wfsep.hpp"

using namespace wfsep;

int main() {
  const MutSelParams truth(0.5, 1.5, 0.0), other(0.9, 1.5, 0.0);
  const EtaSpec eta = EtaSpec::genic();

  const auto b0 = classify_boundary(truth);
  std::cout << "boundary 0: " << to_string(b0.at0) << ", boundary 1: " << to_string(b0.at1) << '\n';
  std::cout << "separating time under the true law: " << separating_time(other, truth).str() << '\n';

  SimConfig cfg;
  cfg.seed = 2024;
  const SamplePath path = simulate_wf(truth, eta, 0.3, 50.0, cfg);
  std::cout << "first hit of 0: " << (path.hit0 ? std::to_string(*path.hit0) : std::string("none")) << '\n';

  if (path.hit0) {
    // Before the hit the two laws are equivalent and the likelihood ratio is an ordinary number.
    const auto before = log_likelihood(other, truth, eta, path_functionals(truncate(path, 0.5 * *path.hit0), eta));
    std::cout << "log likelihood ratio halfway to the hit: " << before.value << '\n';
    const auto after = log_likelihood(other, truth, eta, path_functionals(path, eta));
    std::cout << "after the hit the laws are " << (after.separated ? "singular" : "still equivalent") << '\n';
  }

  const auto est = corrected_estimator(path, eta, truth.s);
  std::cout << "alpha estimate " << est.estimate[0] << (est.crystallized[0] ? " (read off the approach to 0)" : "")
            << ", beta estimate " << est.estimate[1] << '\n';
  return 0;
}
