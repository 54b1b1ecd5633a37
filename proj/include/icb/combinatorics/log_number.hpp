#pragma once

#include <limits>

#include "icb/common/numeric.hpp"

namespace icb::combinatorics {

// sign * exp(log_magnitude); zero is sign 0 with log_magnitude = -inf.
class LogNumber {
 public:
  LogNumber() = default;
  static LogNumber from_log(double log_magnitude, int sign = 1);
  static LogNumber from_double(double x);

  int sign() const { return sign_; }
  double log_magnitude() const { return log_; }
  bool is_zero() const { return sign_ == 0; }
  double to_double() const;

  LogNumber operator-() const;
  friend LogNumber operator*(const LogNumber& a, const LogNumber& b);
  friend LogNumber operator/(const LogNumber& a, const LogNumber& b);
  friend LogNumber operator+(const LogNumber& a, const LogNumber& b);
  friend LogNumber operator-(const LogNumber& a, const LogNumber& b);
  LogNumber pow(double exponent) const;  // requires a positive value

 private:
  int sign_ = 0;
  double log_ = -std::numeric_limits<double>::infinity();
};

// Sums many LogNumbers relative to a running maximum with compensated
// accumulation of the scaled terms.
class LogAccumulator {
 public:
  void add(const LogNumber& x);
  LogNumber value() const;

 private:
  double reference_ = -std::numeric_limits<double>::infinity();
  CompensatedSum scaled_;
};

}  // namespace icb::combinatorics
