#pragma once

#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>
#include <string>

#include "errors.hpp"

namespace bsdiv {

// Real number or +/- infinity. Never NaN. Products follow 0 * inf = 0.
class ExtendedReal {
 public:
  constexpr ExtendedReal() = default;
  ExtendedReal(double v) : v_(v) {  // NOLINT(google-explicit-constructor)
    if (std::isnan(v)) throw NumericError("NaN is not an extended real");
  }

  static ExtendedReal infinity() { return ExtendedReal(kInf); }
  static ExtendedReal neg_infinity() { return ExtendedReal(-kInf); }

  bool is_finite() const { return std::isfinite(v_); }
  bool is_pos_inf() const { return v_ == kInf; }
  bool is_neg_inf() const { return v_ == -kInf; }

  // Finite value; throws for infinities.
  double value() const {
    if (!is_finite()) throw NumericError("extended real is infinite");
    return v_;
  }
  // IEEE view, infinities included.
  double raw() const { return v_; }

  friend ExtendedReal operator+(ExtendedReal a, ExtendedReal b) {
    if ((a.is_pos_inf() && b.is_neg_inf()) || (a.is_neg_inf() && b.is_pos_inf()))
      throw NumericError("inf - inf is undefined");
    return ExtendedReal(a.v_ + b.v_);
  }
  friend ExtendedReal operator-(ExtendedReal a) { return ExtendedReal(-a.v_); }
  friend ExtendedReal operator-(ExtendedReal a, ExtendedReal b) { return a + (-b); }
  friend ExtendedReal operator*(ExtendedReal a, ExtendedReal b) {
    if (a.v_ == 0.0 || b.v_ == 0.0) return ExtendedReal(0.0);
    return ExtendedReal(a.v_ * b.v_);
  }
  ExtendedReal& operator+=(ExtendedReal o) { return *this = *this + o; }
  ExtendedReal& operator-=(ExtendedReal o) { return *this = *this - o; }
  ExtendedReal& operator*=(ExtendedReal o) { return *this = *this * o; }

  friend bool operator==(ExtendedReal a, ExtendedReal b) { return a.v_ == b.v_; }
  friend auto operator<=>(ExtendedReal a, ExtendedReal b) { return a.v_ <=> b.v_; }

  std::string str() const {
    if (is_pos_inf()) return "inf";
    if (is_neg_inf()) return "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v_);
    return buf;
  }
  friend std::ostream& operator<<(std::ostream& os, ExtendedReal x) { return os << x.str(); }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();
  double v_ = 0.0;
};

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

}  // namespace bsdiv
