#include "icb/combinatorics/log_number.hpp"

#include <cmath>

#include "icb/common/errors.hpp"

namespace icb::combinatorics {

LogNumber LogNumber::from_log(double log_magnitude, int sign) {
  LogNumber x;
  if (sign == 0 || log_magnitude == -std::numeric_limits<double>::infinity()) return x;
  if (std::isnan(log_magnitude)) throw InputError("LogNumber: NaN magnitude");
  x.sign_ = sign > 0 ? 1 : -1;
  x.log_ = log_magnitude;
  return x;
}

LogNumber LogNumber::from_double(double v) {
  if (v == 0.0) return {};
  return from_log(std::log(std::abs(v)), v > 0 ? 1 : -1);
}

double LogNumber::to_double() const { return sign_ == 0 ? 0.0 : sign_ * std::exp(log_); }

LogNumber LogNumber::operator-() const {
  LogNumber x = *this;
  x.sign_ = -x.sign_;
  return x;
}

LogNumber operator*(const LogNumber& a, const LogNumber& b) {
  if (a.is_zero() || b.is_zero()) return {};
  return LogNumber::from_log(a.log_ + b.log_, a.sign_ * b.sign_);
}

LogNumber operator/(const LogNumber& a, const LogNumber& b) {
  if (b.is_zero()) throw InputError("LogNumber: division by zero");
  if (a.is_zero()) return {};
  return LogNumber::from_log(a.log_ - b.log_, a.sign_ * b.sign_);
}

LogNumber operator+(const LogNumber& a, const LogNumber& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  const LogNumber& big = a.log_ >= b.log_ ? a : b;
  const LogNumber& small = a.log_ >= b.log_ ? b : a;
  const double ratio = std::exp(small.log_ - big.log_);
  if (big.sign_ == small.sign_) return LogNumber::from_log(big.log_ + std::log1p(ratio), big.sign_);
  if (ratio == 1.0) return {};
  return LogNumber::from_log(big.log_ + std::log1p(-ratio), big.sign_);
}

LogNumber operator-(const LogNumber& a, const LogNumber& b) { return a + (-b); }

LogNumber LogNumber::pow(double exponent) const {
  if (sign_ < 0) throw InputError("LogNumber: pow of a negative value");
  if (sign_ == 0) return exponent > 0 ? LogNumber{} : from_log(0.0);
  return from_log(log_ * exponent);
}

void LogAccumulator::add(const LogNumber& x) {
  if (x.is_zero()) return;
  if (x.log_magnitude() > reference_) {
    if (reference_ != -std::numeric_limits<double>::infinity()) {
      const double shrink = std::exp(reference_ - x.log_magnitude());
      CompensatedSum rescaled;
      rescaled.add(scaled_.value() * shrink);
      scaled_ = rescaled;
    }
    reference_ = x.log_magnitude();
  }
  scaled_.add(x.sign() * std::exp(x.log_magnitude() - reference_));
}

LogNumber LogAccumulator::value() const {
  const double s = scaled_.value();
  if (s == 0.0) return {};
  return LogNumber::from_log(reference_ + std::log(std::abs(s)), s > 0 ? 1 : -1);
}

}  // namespace icb::combinatorics
