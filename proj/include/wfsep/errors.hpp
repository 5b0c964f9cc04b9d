#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>

namespace wfsep {

// Violated model or operation precondition (negative mutation rate, x0 outside
// [0,1], zero eta polynomial, ...).
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Adaptive quadrature did not reach the requested tolerance.
class QuadratureError : public std::runtime_error {
 public:
  QuadratureError(const std::string& what, double achieved)
      : std::runtime_error(what + " (achieved error estimate " + fmt(achieved) + ")"),
        achieved_(achieved) {}
  double achieved() const { return achieved_; }

 private:
  static std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.3g", v);
    return buf;
  }
  double achieved_;
};

// The observed information matrix is singular or too ill-conditioned to solve.
class SingularInformation : public std::runtime_error {
 public:
  SingularInformation(const std::string& what, double condition)
      : std::runtime_error(what), condition_(condition) {}
  double condition() const { return condition_; }

 private:
  double condition_;
};

// A mutation-rate denominator (A_T or B_T) is infinite: the estimate has
// crystallized and has to be taken as a limit before the hitting time.
class CrystallizeSignal : public std::runtime_error {
 public:
  CrystallizeSignal(const std::string& what, int endpoint)
      : std::runtime_error(what), endpoint_(endpoint) {}
  int endpoint() const { return endpoint_; }

 private:
  int endpoint_;
};

// The observed path carries no information about the requested parameter.
class DegeneratePath : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A numerical divergence classifier saw a pattern matching neither regime.
class Inconclusive : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace wfsep
