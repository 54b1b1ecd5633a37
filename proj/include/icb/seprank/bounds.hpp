#pragma once

#include <string>

namespace icb::seprank {

double log3(double x);

// Leading-order value of a rank bound in log-rank units. The polylog factors
// hidden by the O-tilde are listed next to the value and never folded in.
struct LeadingOrderBound {
  double value = 0.0;
  double log_dx = 0.0;
  double log_depth = 0.0;
  double log_heads = 0.0;  // 0 when the bound has no head factor
  bool hypothesis_ok = true;
  std::string warning;
};

// L * d_x; flags L <= log3(d_x).
LeadingOrderBound bound_in_context(int L, int d_x, int H);

// (L + 0.5 log3(eta)) * d_x, reported as-is when negative.
LeadingOrderBound bound_sequential(int L, int d_x, double eta);

// 0.5 * log3(1/eta): layers lost to the sequential setting.
double depth_deficit(double eta);

// ln of multiset(d_x, 3^L)^{-1} = -ln C(3^L + d_x - 1, 3^L).
double log_epsilon_scale(int L, int d_x);

}  // namespace icb::seprank
