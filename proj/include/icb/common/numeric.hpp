#pragma once

#include <span>

#include "icb/common/matrix.hpp"

namespace icb {

// Neumaier's variant of Kahan summation.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

double compensated_dot(std::span<const double> a, std::span<const double> b);
double compensated_total(std::span<const double> xs);

// y = m * x with compensated row reductions.
Vector mat_vec(const Matrix& m, std::span<const double> x);
// y = m^T * x.
Vector mat_t_vec(const Matrix& m, std::span<const double> x);
Matrix mat_mul(const Matrix& a, const Matrix& b);

double frobenius_norm(const Matrix& m);
double max_abs(const Matrix& m);

}  // namespace icb
