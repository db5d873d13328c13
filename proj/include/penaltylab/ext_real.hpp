#pragma once

#include <cmath>
#include <limits>

#include "penaltylab/errors.hpp"

namespace penaltylab {

/// A value of R ∪ {+∞}. Negative infinity is never representable: any
/// operation that would produce it throws EvalError(NegativeInfinity).
class ExtReal {
 public:
  constexpr ExtReal() = default;
  ExtReal(double v) : v_(check(v)) {}  // NOLINT(google-explicit-constructor)

  static ExtReal infinity() { return ExtReal(std::numeric_limits<double>::infinity()); }

  bool is_infinite() const noexcept { return std::isinf(v_); }
  bool is_finite() const noexcept { return !std::isinf(v_); }
  double value() const noexcept { return v_; }

  friend bool operator==(ExtReal a, ExtReal b) { return a.v_ == b.v_; }
  friend bool operator<(ExtReal a, ExtReal b) { return a.v_ < b.v_; }
  friend bool operator<=(ExtReal a, ExtReal b) { return a.v_ <= b.v_; }

  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.is_infinite() || b.is_infinite()) return infinity();
    return ExtReal(a.v_ + b.v_);
  }

  /// a − b; throws when b = +∞ (the result would be −∞ or undefined).
  friend ExtReal operator-(ExtReal a, ExtReal b) {
    if (b.is_infinite())
      throw EvalError(EvalErrorKind::NegativeInfinity, "subtraction of +inf");
    if (a.is_infinite()) return infinity();
    return ExtReal(a.v_ - b.v_);
  }

  /// Products follow c·∞ = ∞ for c > 0 and 0·∞ = 0.
  friend ExtReal operator*(ExtReal a, ExtReal b) {
    if (a.is_infinite() || b.is_infinite()) {
      const double other = a.is_infinite() ? b.v_ : a.v_;
      if (other > 0.0) return infinity();
      if (other == 0.0) return ExtReal(0.0);
      throw EvalError(EvalErrorKind::NegativeInfinity, "negative scalar times +inf");
    }
    return ExtReal(a.v_ * b.v_);
  }

 private:
  static double check(double v) {
    if (std::isnan(v)) throw EvalError(EvalErrorKind::NonFinite, "NaN produced");
    if (v == -std::numeric_limits<double>::infinity())
      throw EvalError(EvalErrorKind::NegativeInfinity, "-inf produced");
    return v;
  }

  double v_ = 0.0;
};

inline ExtReal ext_min(ExtReal a, ExtReal b) { return b < a ? b : a; }
inline ExtReal ext_max(ExtReal a, ExtReal b) { return a < b ? b : a; }

}  // namespace penaltylab
