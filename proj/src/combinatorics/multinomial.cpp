#include "icb/combinatorics/multinomial.hpp"

#include <cmath>
#include <numeric>

#include "icb/common/errors.hpp"

namespace icb::combinatorics {

double log_factorial(long long n) {
  if (n < 0) throw InputError("log_factorial: negative argument");
  return std::lgamma(static_cast<double>(n) + 1.0);
}

LogNumber log_binomial(long long n, long long k) {
  if (k < 0 || k > n) return {};
  return LogNumber::from_log(log_factorial(n) - log_factorial(k) - log_factorial(n - k));
}

LogNumber log_multinomial(long long K, std::span<const int> parts) {
  long long total = 0;
  double log = log_factorial(K);
  for (int p : parts) {
    if (p < 0) throw InputError("log_multinomial: negative part");
    total += p;
    log -= log_factorial(p);
  }
  if (total != K) throw InputError("log_multinomial: parts do not sum to K");
  return LogNumber::from_log(log);
}

std::vector<int> balanced_split(int K, int M) {
  if (K < 0 || M < 1) throw InputError("balanced_split: need K >= 0, M >= 1");
  const int q = K / M, r = K % M;
  std::vector<int> parts(static_cast<std::size_t>(M), q);
  for (int i = 0; i < r; ++i) parts[static_cast<std::size_t>(i)] = q + 1;
  return parts;
}

std::vector<int> multinomial_max_location(int K, int M) {
  if (K < 1 || M < 1) throw InputError("multinomial_max_location: need K, M >= 1");
  return balanced_split(K, M);
}

double composition_count(int K, int M) {
  return std::round(std::exp(log_binomial(K + M - 1, M - 1).log_magnitude()));
}

void for_each_composition(int K, int M, const std::function<void(std::span<const int>)>& visit) {
  if (K < 0 || M < 1) throw InputError("for_each_composition: need K >= 0, M >= 1");
  std::vector<int> a(static_cast<std::size_t>(M), 0);
  a.back() = K;
  // Lexicographic successor over the first M-1 parts; the last absorbs the rest.
  while (true) {
    visit(a);
    if (M == 1) return;
    int i = M - 2;
    while (i >= 0 && a.back() == 0) {
      a.back() += a[static_cast<std::size_t>(i)];
      a[static_cast<std::size_t>(i)] = 0;
      --i;
    }
    if (i < 0) return;
    ++a[static_cast<std::size_t>(i)];
    --a.back();
  }
}

}  // namespace icb::combinatorics
