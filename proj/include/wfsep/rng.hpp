#pragma once

#include <cstdint>
#include <random>

#include <boost/random/gamma_distribution.hpp>
#include <boost/random/normal_distribution.hpp>
#include <boost/random/poisson_distribution.hpp>
#include <boost/random/uniform_01.hpp>

namespace wfsep {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// One independent stream per (seed, stream index); the stream seed depends on
// nothing else, so a batch gives the same per-path results on any number of
// workers. Boost distributions are used because their output is specified by
// the library rather than by the standard library vendor.
class Rng {
 public:
  explicit Rng(std::uint64_t seed, std::uint64_t stream = 0)
      : eng_(splitmix64(splitmix64(seed) ^ splitmix64(stream + 0x632be59bd9b4e019ULL))) {}

  double normal() { return normal_(eng_); }
  double uniform() { return uniform_(eng_); }

  double gamma(double shape) {
    boost::random::gamma_distribution<double> g(shape, 1.0);
    return g(eng_);
  }

  long long poisson(double mean) {
    if (mean <= 0.0) return 0;
    boost::random::poisson_distribution<long long, double> p(mean);
    return p(eng_);
  }

  // Noncentral chi-square with `dof` degrees of freedom and noncentrality
  // lambda, as a Poisson(lambda/2) mixture of central chi-squares. The only
  // atom is at 0, reached when dof = 0 and the Poisson draw is 0.
  double noncentral_chi2(double dof, double lambda) {
    const long long n = poisson(0.5 * lambda);
    const double k = dof + 2.0 * static_cast<double>(n);
    if (k <= 0.0) return 0.0;
    return 2.0 * gamma(0.5 * k);
  }

  std::mt19937_64& engine() { return eng_; }

 private:
  std::mt19937_64 eng_;
  boost::random::normal_distribution<double> normal_{0.0, 1.0};
  boost::random::uniform_01<double> uniform_;
};

}  // namespace wfsep
