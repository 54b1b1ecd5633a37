#include "icb/combinatorics/lemmas.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "icb/combinatorics/multinomial.hpp"
#include "icb/common/errors.hpp"
#include "icb/common/parallel.hpp"

namespace icb::combinatorics {

namespace {

constexpr double kCompositionGuard = 1e6;
constexpr double kSummandGuard = 5e7;

// Ties in log space: values within this distance of a threshold qualify.
double tie_slack(double reference) { return 1e-10 * std::max(1.0, std::abs(reference)); }

void check_s_args(int K, int M, double eta) {
  if (K < 1 || M < 1) throw InputError("S(n): need K, M >= 1");
  if (!(eta > 0.0 && eta <= 1.0)) throw InputError("S(n): eta must lie in (0, 1]");
}

void check_sensitivity(double s) {
  if (!(s > 0.0 && s < 1.0)) throw InputError("sensitivity s must lie in (0, 1)");
}

double log_balanced(int K, int M) {
  const auto parts = balanced_split(K, M);
  return log_multinomial(K, parts).log_magnitude();
}

}  // namespace

LogNumber s_direct(int K, int M, double eta, int n) {
  check_s_args(K, M, eta);
  if (n < 0 || n > K) throw InputError("S(n): n out of range");
  return log_binomial(K, n) * LogNumber::from_log(n * std::log(eta)) *
         LogNumber::from_log(log_balanced(n, M) + log_balanced(K - n, M));
}

LogNumber s_recurrence(int K, int M, double eta, int n) {
  check_s_args(K, M, eta);
  if (n < 0 || n > K) throw InputError("S(n): n out of range");
  CompensatedSum log;
  log.add(log_balanced(K, M));
  for (int m = 0; m < n; ++m) {
    const int up = (K - m + M - 1) / M;
    const int down = m / M + 1;
    log.add(std::log(eta) + std::log(static_cast<double>(up)) - std::log(static_cast<double>(down)));
  }
  return LogNumber::from_log(log.value());
}

LogNumber s_grouped_product(int K, int M, double eta, int n) {
  check_s_args(K, M, eta);
  if (n < 0 || n > K) throw InputError("S(n): n out of range");
  CompensatedSum log;
  log.add(log_balanced(K, M));
  const int groups = n / M;
  auto factor = [&](int j) {
    return std::log(eta * static_cast<double>(K - j * M) / static_cast<double>((j + 1) * M));
  };
  for (int j = 0; j < groups; ++j) log.add(M * factor(j));
  if (n % M) log.add((n % M) * factor(groups));
  return LogNumber::from_log(log.value());
}

int argmax_s(int K, int M, double eta) {
  check_s_args(K, M, eta);
  const double x = (eta * K - M) / (M * (1.0 + eta));
  return (static_cast<int>(std::floor(x)) + 1) * M;
}

std::vector<int> argmax_s_exhaustive(int K, int M, double eta) {
  check_s_args(K, M, eta);
  std::vector<double> logs;
  for (int n = 0; n <= K; ++n) logs.push_back(s_direct(K, M, eta, n).log_magnitude());
  const double best = *std::max_element(logs.begin(), logs.end());
  std::vector<int> out;
  for (int n = 0; n <= K; ++n)
    if (logs[static_cast<std::size_t>(n)] >= best - tie_slack(best)) out.push_back(n);
  return out;
}

LatticeCount lattice_ball_count(int d, int R) {
  if (d < 1 || R < 0) throw InputError("lattice_ball_count: need d >= 1, R >= 0");
  if (d > 6 || R > 10)
    throw BudgetError("lattice_ball_count: enumeration of (2R+1)^d points allowed only for d <= 6, R <= 10");
  LatticeCount out;
  const long long r2 = static_cast<long long>(R) * R;
  std::vector<int> x(static_cast<std::size_t>(d), -R);
  while (true) {
    long long norm = 0;
    for (int v : x) norm += static_cast<long long>(v) * v;
    if (norm <= r2) ++out.exact;
    int i = 0;
    while (i < d && x[static_cast<std::size_t>(i)] == R) x[static_cast<std::size_t>(i++)] = -R;
    if (i == d) break;
    ++x[static_cast<std::size_t>(i)];
  }
  const double dd = d;
  const double front = std::pow(std::numbers::pi * std::numbers::e / 2.0, dd / 2.0) /
                       std::sqrt(std::numbers::pi * dd);
  out.lower = front * std::pow(2.0 * R / std::sqrt(dd) - 1.0, dd);
  out.upper = front * std::pow(2.0 * R / std::sqrt(dd) + 1.0, dd);
  return out;
}

TCharacterization characterize_T(int K, int M, double s) {
  check_sensitivity(s);
  if (K < 1 || M < 1) throw InputError("characterize_T: need K, M >= 1");
  if (composition_count(K, M) > kCompositionGuard)
    throw BudgetError("characterize_T: C(K+M-1, M-1) exceeds 1e6 compositions");
  const double ref = log_balanced(K, M) + std::log(s);
  const double slack = tie_slack(ref);
  const double center = static_cast<double>(K) / M;
  const double ln_inv = std::log(1.0 / s);
  TCharacterization out;
  for_each_composition(K, M, [&](std::span<const int> a) {
    std::vector<int> parts(a.begin(), a.end());
    double dist = 0.0;
    for (int v : parts) dist += (v - center) * (v - center);
    const bool in_t = log_multinomial(K, parts).log_magnitude() >= ref - slack;
    const bool in_inner = dist <= center * ln_inv;
    const bool in_outer = dist <= 4.0 * K * ln_inv;
    if (in_inner && !in_t) out.inner_in_exact = false;
    if (in_t && !in_outer) out.exact_in_outer = false;
    if (in_t) out.exact.push_back(parts);
    if (in_inner) out.inner.push_back(parts);
    if (in_outer) out.outer.push_back(std::move(parts));
  });
  return out;
}

BinomEtaCount count_nonneg_binom_eta(int K, double eta, double s) {
  if (K < 1) throw InputError("count_nonneg_binom_eta: need K >= 1");
  if (!(eta > 0.0 && eta <= 1.0)) throw InputError("count_nonneg_binom_eta: eta must lie in (0, 1]");
  if (!(s > 0.0 && s <= 1.0)) throw InputError("count_nonneg_binom_eta: s must lie in (0, 1]");
  std::vector<double> logs;
  for (int n = 0; n <= K; ++n) logs.push_back(log_binomial(K, n).log_magnitude() + n * std::log(eta));
  const double best = *std::max_element(logs.begin(), logs.end());
  const double threshold = best + std::log(s);
  BinomEtaCount out;
  for (double v : logs)
    if (v >= threshold - tie_slack(threshold)) ++out.exact;
  const double ln_inv = std::log(1.0 / s);
  out.bound_defined = ln_inv > 1.0;
  out.upper = out.bound_defined
                  ? K * std::sqrt(std::pow(2.0 * ln_inv - 1.0, 2) * std::pow(1.0 + eta, 2) - 4.0 * eta) /
                        (2.0 * (1.0 + eta) * (ln_inv - 1.0))
                  : std::nan("");
  return out;
}

namespace {

struct Layer {
  double base = 0.0;         // ln C(K,n) + n ln eta
  std::vector<double> a;     // ln multinomial(n; a), ascending
  std::vector<double> b;     // ln multinomial(K-n; b), ascending
};

Layer summand_layer(int K, int M, double eta, int n) {
  Layer l;
  l.base = log_binomial(K, n).log_magnitude() + n * std::log(eta);
  for_each_composition(n, M, [&](std::span<const int> p) {
    l.a.push_back(log_multinomial(n, p).log_magnitude());
  });
  for_each_composition(K - n, M, [&](std::span<const int> p) {
    l.b.push_back(log_multinomial(K - n, p).log_magnitude());
  });
  std::sort(l.a.begin(), l.a.end());
  std::sort(l.b.begin(), l.b.end());
  return l;
}

void check_summand_budget(int K, int M) {
  double total = 0.0;
  for (int n = 0; n <= K; ++n) total += composition_count(n, M) * composition_count(K - n, M);
  if (total > kSummandGuard)
    throw BudgetError("summand enumeration needs " + std::to_string(static_cast<long long>(total)) +
                      " index tuples; the guard allows 5e7");
}

// Pairs (x, y) in a x b with base + x + y >= threshold, both sorted ascending.
long long count_pairs(const Layer& l, double threshold) {
  long long count = 0;
  std::size_t j = l.b.size();
  for (double x : l.a) {
    // b is ascending, x ascending: the qualifying suffix of b only grows.
    while (j > 0 && l.base + x + l.b[j - 1] >= threshold) --j;
    count += static_cast<long long>(l.b.size() - j);
  }
  return count;
}

}  // namespace

SummandExtremes summand_extremes(int K, int M, double eta) {
  check_s_args(K, M, eta);
  check_summand_budget(K, M);
  std::vector<double> all;
  for (int n = 0; n <= K; ++n) {
    const Layer l = summand_layer(K, M, eta, n);
    for (double x : l.a)
      for (double y : l.b) all.push_back(l.base + x + y);
  }
  std::sort(all.begin(), all.end(), std::greater<>());
  SummandExtremes e;
  e.log_max = all.front();
  e.log_second = e.log_max;
  for (double v : all)
    if (v < e.log_max - tie_slack(e.log_max)) {
      e.log_second = v;
      break;
    }
  return e;
}

SummandCount count_nonneg_summands(int K, int M, double eta, double s, unsigned threads) {
  check_s_args(K, M, eta);
  check_sensitivity(s);
  check_summand_budget(K, M);
  std::vector<Layer> layers(static_cast<std::size_t>(K) + 1);
  parallel_for(layers.size(), threads, [&](std::size_t n) {
    layers[n] = summand_layer(K, M, eta, static_cast<int>(n));
  });
  double best = -INFINITY;
  for (const auto& l : layers) best = std::max(best, l.base + l.a.back() + l.b.back());

  const double threshold = best + std::log(s);
  std::vector<long long> counts(layers.size()), ties(layers.size());
  parallel_for(layers.size(), threads, [&](std::size_t n) {
    counts[n] = count_pairs(layers[n], threshold - tie_slack(threshold));
    ties[n] = count_pairs(layers[n], best - tie_slack(best));
  });

  SummandCount out;
  for (std::size_t n = 0; n < layers.size(); ++n) {
    out.exact += counts[n];
    out.max_multiplicity += ties[n];
  }
  const double k = K, m = M, ln_inv = std::log(1.0 / s);
  const double pi = std::numbers::pi, e = std::numbers::e;
  out.upper = 2.0 * k / ((m - 1.0) * (m - 1.0) * pi) *
              std::pow(25.0 * pi * e * k * ln_inv * std::sqrt(eta) / (2.0 * (m - 1.0) * (1.0 + eta)),
                       m - 1.0);
  out.lower = 1.0 / (m * std::sqrt(pi)) *
              std::pow(pi * e * k * ln_inv / (2.0 * m * m * (1.0 + eta)), (m - 1.0) / 2.0);
  out.upper_hypothesis = M >= 2 && eta * k / (1.0 + eta) >= m - 1.0 && s <= std::exp(-1.5);
  out.lower_hypothesis = M >= 2 && k / (1.0 + eta) >= m * m && s <= std::exp(-1.5);
  return out;
}

double degree_budget(int L) { return std::pow(3.0, L); }

TheoremB1Result theorem_b1_bound(const BoundInstance& inst) {
  TheoremB1Result r;
  auto flag = [&](bool ok, const std::string& what) {
    if (!ok) {
      r.hypotheses_ok = false;
      r.violations.push_back(what);
    }
  };
  if (inst.L < 1 || inst.d_x < 2 || inst.N < 1 || inst.H < 1)
    throw InputError("theorem_b1_bound: need L >= 1, d_x >= 2, N >= 1, H >= 1");
  if (!(inst.lambda_min > 0.0 && inst.lambda_min <= inst.lambda_max))
    throw InputError("theorem_b1_bound: need 0 < lambda_min <= lambda_max");
  if (!(inst.epsilon > 0.0) || !(inst.M_bound > 0.0))
    throw InputError("theorem_b1_bound: epsilon and M must be > 0");

  const double K = degree_budget(inst.L);  // 2C(L) + 1
  const double C = (K - 1.0) / 2.0;
  const double dx = inst.d_x, N = inst.N, L = inst.L, eta = inst.eta;
  flag(eta > 0.0 && eta <= 1.0, "eta must lie in (0, 1]");
  flag(2.0 * (1.0 + eta) * dx / eta < K, "2(1+eta) d_x / eta < 3^L");
  flag(2.0 * (1.0 + eta) * dx * dx < K, "2(1+eta) d_x^2 < 3^L");
  flag(inst.N < inst.d_x, "N < d_x");
  if (!(eta > 0.0)) throw InputError("theorem_b1_bound: eta must be > 0");

  const double e = std::numbers::e;
  // ln of (dxN / (e(2 dxN + K)))^{2 dxN} (lmin/lmax)^{(L+2)(2C+2)} eps / M
  const double log_inner = 2.0 * dx * N * std::log(dx * N / (e * (2.0 * dx * N + K))) +
                           (L + 2.0) * (2.0 * C + 2.0) * std::log(inst.lambda_min / inst.lambda_max) +
                           std::log(inst.epsilon) - std::log(inst.M_bound);
  const double log1p_inner =
      log_inner > 30.0 ? log_inner + std::log1p(std::exp(-log_inner)) : std::log1p(std::exp(log_inner));

  CompensatedSum log;
  log.add(std::log(2.0 * K / ((dx - 1.0) * (dx - 1.0))));
  log.add((dx - 1.0) * std::log(25.0 * std::sqrt(eta) / (dx - 1.0)));
  log.add(3.0 * N * std::log(2.0));
  log.add(4.0 * dx * std::log(e * (2.0 * dx + K)));
  log.add(-2.0 * log1p_inner);
  log.add(-2.0 * dx * std::log(dx));
  r.bound = LogNumber::from_log(log.value());
  return r;
}

}  // namespace icb::combinatorics
