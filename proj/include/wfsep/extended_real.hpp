#pragma once

#include <cmath>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace wfsep {

// A real number that may also be +inf or -inf. Infinite values are carried as
// an explicit tag so that callers branching on finiteness never compare against
// an overflowed double.
class ExtendedReal {
 public:
  enum class Kind { Finite, PosInf, NegInf };

  constexpr ExtendedReal() = default;
  constexpr ExtendedReal(double v) : kind_(Kind::Finite), value_(v) {}  // NOLINT

  static constexpr ExtendedReal pos_inf() { return ExtendedReal(Kind::PosInf); }
  static constexpr ExtendedReal neg_inf() { return ExtendedReal(Kind::NegInf); }

  // Maps IEEE infinities onto the tagged kinds.
  static ExtendedReal from_double(double v) {
    if (std::isinf(v)) return v > 0 ? pos_inf() : neg_inf();
    return ExtendedReal(v);
  }

  constexpr Kind kind() const { return kind_; }
  constexpr bool finite() const { return kind_ == Kind::Finite; }
  constexpr bool is_pos_inf() const { return kind_ == Kind::PosInf; }
  constexpr bool is_neg_inf() const { return kind_ == Kind::NegInf; }

  double value() const {
    if (!finite()) throw std::domain_error("ExtendedReal: value() on an infinite quantity");
    return value_;
  }

  // IEEE view, for printing and for arithmetic where infinities are harmless.
  double as_double() const {
    switch (kind_) {
      case Kind::PosInf: return std::numeric_limits<double>::infinity();
      case Kind::NegInf: return -std::numeric_limits<double>::infinity();
      default: return value_;
    }
  }

  friend bool operator==(const ExtendedReal& a, const ExtendedReal& b) {
    return a.kind_ == b.kind_ && (a.kind_ != Kind::Finite || a.value_ == b.value_);
  }

 private:
  explicit constexpr ExtendedReal(Kind k) : kind_(k) {}

  Kind kind_ = Kind::Finite;
  double value_ = 0.0;
};

inline std::ostream& operator<<(std::ostream& os, const ExtendedReal& x) {
  if (x.is_pos_inf()) return os << "inf";
  if (x.is_neg_inf()) return os << "-inf";
  return os << x.value();
}

}  // namespace wfsep
