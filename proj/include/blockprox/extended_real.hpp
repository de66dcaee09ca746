#ifndef BLOCKPROX_EXTENDED_REAL_HPP_
#define BLOCKPROX_EXTENDED_REAL_HPP_

#include <cassert>
#include <cmath>
#include <limits>

#include "blockprox/errors.hpp"

namespace blockprox {

/// A finite real or +infinity, as a tagged value rather than an IEEE inf
/// convention. Regularizer values live here; -infinity and NaN are rejected
/// so that linesearch comparisons stay total and deterministic.
class ExtendedReal {
 public:
  constexpr ExtendedReal() : value_(0.0), finite_(true) {}

  // Implicit from double on purpose: finite objective values flow in
  // everywhere. +inf maps to the infinite tag; -inf/NaN are misuse.
  ExtendedReal(double v) : value_(v), finite_(true) {
    if (std::isnan(v) || v == -std::numeric_limits<double>::infinity()) {
      throw UsageError("ExtendedReal: value must be finite or +inf");
    }
    if (v == std::numeric_limits<double>::infinity()) {
      value_ = 0.0;
      finite_ = false;
    }
  }

  static constexpr ExtendedReal infinity() {
    ExtendedReal r;
    r.finite_ = false;
    return r;
  }

  constexpr bool is_finite() const { return finite_; }

  constexpr double value() const {
    assert(finite_);
    return value_;
  }

  /// Finite value, or `inf_substitute` when infinite.
  constexpr double value_or(double inf_substitute) const {
    return finite_ ? value_ : inf_substitute;
  }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if (!a.finite_ || !b.finite_) return infinity();
    return ExtendedReal(a.value_ + b.value_);
  }

  ExtendedReal& operator+=(ExtendedReal o) {
    *this = *this + o;
    return *this;
  }

  // Total order with every finite value below +inf.
  friend constexpr bool operator<(ExtendedReal a, ExtendedReal b) {
    if (!a.finite_) return false;
    if (!b.finite_) return true;
    return a.value_ < b.value_;
  }
  friend constexpr bool operator==(ExtendedReal a, ExtendedReal b) {
    if (a.finite_ != b.finite_) return false;
    return !a.finite_ || a.value_ == b.value_;
  }
  friend constexpr bool operator<=(ExtendedReal a, ExtendedReal b) {
    return a < b || a == b;
  }
  friend constexpr bool operator>(ExtendedReal a, ExtendedReal b) { return b < a; }
  friend constexpr bool operator>=(ExtendedReal a, ExtendedReal b) { return b <= a; }
  friend constexpr bool operator!=(ExtendedReal a, ExtendedReal b) { return !(a == b); }

 private:
  double value_;
  bool finite_;
};

}  // namespace blockprox

#endif  // BLOCKPROX_EXTENDED_REAL_HPP_
