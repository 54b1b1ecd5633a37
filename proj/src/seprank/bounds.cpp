#include "icb/seprank/bounds.hpp"

#include <cmath>

#include "icb/common/errors.hpp"

namespace icb::seprank {

double log3(double x) { return std::log(x) / std::log(3.0); }

LeadingOrderBound bound_in_context(int L, int d_x, int H) {
  if (L < 1 || d_x < 1 || H < 1) throw InputError("bound_in_context: L, d_x, H must be >= 1");
  LeadingOrderBound b;
  b.value = static_cast<double>(L) * static_cast<double>(d_x);
  b.log_dx = std::log(static_cast<double>(d_x));
  b.log_depth = std::log(static_cast<double>(L));
  b.log_heads = std::log(static_cast<double>(H));
  // d_x = 1 gives log3 = 0 < L for every L >= 1.
  if (!(static_cast<double>(L) > log3(static_cast<double>(d_x)))) {
    b.hypothesis_ok = false;
    b.warning = "depth L does not exceed log3(d_x)";
  }
  return b;
}

LeadingOrderBound bound_sequential(int L, int d_x, double eta) {
  if (L < 1 || d_x < 1) throw InputError("bound_sequential: L, d_x must be >= 1");
  if (!(eta > 0.0 && eta <= 1.0)) throw InputError("bound_sequential: eta must lie in (0, 1]");
  LeadingOrderBound b;
  b.value = (static_cast<double>(L) + 0.5 * log3(eta)) * static_cast<double>(d_x);
  b.log_dx = std::log(static_cast<double>(d_x));
  b.log_depth = std::log(static_cast<double>(L));
  if (b.value < 0.0) b.warning = "depth deficit exceeds L; leading term is negative";
  return b;
}

double depth_deficit(double eta) {
  if (!(eta > 0.0 && eta <= 1.0)) throw InputError("depth_deficit: eta must lie in (0, 1]");
  return 0.5 * log3(1.0 / eta);
}

double log_epsilon_scale(int L, int d_x) {
  if (L < 1 || d_x < 1) throw InputError("log_epsilon_scale: L, d_x must be >= 1");
  const double lambda = std::pow(3.0, L);
  const double d = static_cast<double>(d_x);
  // ln C(lambda + d - 1, lambda)
  const double log_binom =
      std::lgamma(lambda + d) - std::lgamma(lambda + 1.0) - std::lgamma(d);
  return -log_binom;
}

}  // namespace icb::seprank
