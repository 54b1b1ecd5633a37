#include "icb/common/numeric.hpp"

#include <cmath>

#include "icb/common/errors.hpp"

namespace icb {

void CompensatedSum::add(double x) {
  const double t = sum_ + x;
  if (std::abs(sum_) >= std::abs(x))
    comp_ += (sum_ - t) + x;
  else
    comp_ += (x - t) + sum_;
  sum_ = t;
}

double compensated_dot(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("compensated_dot: length mismatch");
  CompensatedSum s;
  for (std::size_t i = 0; i < a.size(); ++i) s.add(a[i] * b[i]);
  return s.value();
}

double compensated_total(std::span<const double> xs) {
  CompensatedSum s;
  for (double x : xs) s.add(x);
  return s.value();
}

Vector mat_vec(const Matrix& m, std::span<const double> x) {
  if (m.cols() != x.size()) throw InputError("mat_vec: shape mismatch");
  Vector y(m.rows());
  for (std::size_t r = 0; r < m.rows(); ++r) y[r] = compensated_dot(m.row(r), x);
  return y;
}

Vector mat_t_vec(const Matrix& m, std::span<const double> x) {
  if (m.rows() != x.size()) throw InputError("mat_t_vec: shape mismatch");
  Vector y(m.cols());
  for (std::size_t c = 0; c < m.cols(); ++c) {
    CompensatedSum s;
    for (std::size_t r = 0; r < m.rows(); ++r) s.add(m(r, c) * x[r]);
    y[c] = s.value();
  }
  return y;
}

Matrix mat_mul(const Matrix& a, const Matrix& b) {
  if (a.cols() != b.rows()) throw InputError("mat_mul: shape mismatch");
  Matrix out(a.rows(), b.cols());
  for (std::size_t i = 0; i < a.rows(); ++i)
    for (std::size_t j = 0; j < b.cols(); ++j) {
      CompensatedSum s;
      for (std::size_t k = 0; k < a.cols(); ++k) s.add(a(i, k) * b(k, j));
      out(i, j) = s.value();
    }
  return out;
}

double frobenius_norm(const Matrix& m) {
  // Scaled to avoid overflow for large entries.
  const double scale = max_abs(m);
  if (scale == 0.0) return 0.0;
  CompensatedSum s;
  for (double v : m.values()) {
    const double t = v / scale;
    s.add(t * t);
  }
  return scale * std::sqrt(s.value());
}

double max_abs(const Matrix& m) {
  double best = 0.0;
  for (double v : m.values()) best = std::max(best, std::abs(v));
  return best;
}

}  // namespace icb
