#pragma once

#include <cmath>
#include <compare>
#include <limits>
#include <ostream>

#include "kantor/errors.hpp"

namespace kantor {

// Extended real with an explicit three-way tag. Costs and transfer values
// genuinely take +inf, and sentinel floats corrupt LP data, so infinities
// never enter numeric arrays; they live here instead.
//
// Arithmetic follows the convex-analysis conventions: +inf absorbs
// addition, 0 * inf = 0 in integrals (handled at call sites), and
// (+inf) + (-inf) throws ArithmeticError.
class ExtReal {
 public:
  enum class Tag : unsigned char { Finite, PosInf, NegInf };

  constexpr ExtReal() : value_(0.0), tag_(Tag::Finite) {}
  constexpr ExtReal(double v) : value_(v), tag_(Tag::Finite) {}  // NOLINT: implicit by design

  static constexpr ExtReal pos_inf() { return ExtReal(0.0, Tag::PosInf); }
  static constexpr ExtReal neg_inf() { return ExtReal(0.0, Tag::NegInf); }

  constexpr bool finite() const { return tag_ == Tag::Finite; }
  constexpr bool is_pos_inf() const { return tag_ == Tag::PosInf; }
  constexpr bool is_neg_inf() const { return tag_ == Tag::NegInf; }
  constexpr Tag tag() const { return tag_; }

  double value() const {
    if (!finite()) throw ArithmeticError("value() on infinite ExtReal");
    return value_;
  }
  // Finite part, 0 for infinities. For formatting and bounds only.
  constexpr double finite_or(double fallback) const {
    return finite() ? value_ : fallback;
  }

  friend ExtReal operator+(ExtReal a, ExtReal b) {
    if (a.finite() && b.finite()) return ExtReal(a.value_ + b.value_);
    if (a.is_pos_inf() && b.is_neg_inf()) throw ArithmeticError("(+inf) + (-inf)");
    if (a.is_neg_inf() && b.is_pos_inf()) throw ArithmeticError("(-inf) + (+inf)");
    return a.finite() ? b : a;
  }
  friend ExtReal operator-(ExtReal a) {
    if (a.is_pos_inf()) return neg_inf();
    if (a.is_neg_inf()) return pos_inf();
    return ExtReal(-a.value_);
  }
  friend ExtReal operator-(ExtReal a, ExtReal b) { return a + (-b); }

  // Scale by a finite nonnegative weight; 0 * inf = 0 (integral convention).
  friend ExtReal operator*(double w, ExtReal a) {
    if (a.finite()) return ExtReal(w * a.value_);
    if (w == 0.0) return ExtReal(0.0);
    if (w < 0.0) return a.is_pos_inf() ? neg_inf() : pos_inf();
    return a;
  }

  friend bool operator==(ExtReal a, ExtReal b) {
    if (a.tag_ != b.tag_) return false;
    return !a.finite() || a.value_ == b.value_;
  }
  friend bool operator<(ExtReal a, ExtReal b) {
    if (a.is_neg_inf()) return !b.is_neg_inf();
    if (a.is_pos_inf()) return false;
    if (b.is_pos_inf()) return true;
    if (b.is_neg_inf()) return false;
    return a.value_ < b.value_;
  }
  friend bool operator<=(ExtReal a, ExtReal b) { return a < b || a == b; }
  friend bool operator>(ExtReal a, ExtReal b) { return b < a; }
  friend bool operator>=(ExtReal a, ExtReal b) { return b <= a; }

  friend ExtReal max(ExtReal a, ExtReal b) { return a < b ? b : a; }
  friend ExtReal min(ExtReal a, ExtReal b) { return a < b ? a : b; }

  friend std::ostream& operator<<(std::ostream& os, ExtReal a) {
    if (a.is_pos_inf()) return os << "inf";
    if (a.is_neg_inf()) return os << "-inf";
    return os << a.value_;
  }

 private:
  constexpr ExtReal(double v, Tag t) : value_(v), tag_(t) {}
  double value_;
  Tag tag_;
};

}  // namespace kantor
