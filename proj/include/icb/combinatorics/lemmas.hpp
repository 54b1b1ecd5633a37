#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icb/combinatorics/log_number.hpp"

namespace icb::combinatorics {

// S(n) = C(K,n) eta^n multinomial(n; balanced) multinomial(K-n; balanced).
LogNumber s_direct(int K, int M, double eta, int n);

// S(0) times the step ratios S(m+1)/S(m) = eta * ceil((K-m)/M) / (floor(m/M) + 1).
LogNumber s_recurrence(int K, int M, double eta, int n);

// The grouped product prod_j (eta (K - jM) / ((j+1) M))^M times the partial
// group, times S(0). Equals s_recurrence only when M divides K.
LogNumber s_grouped_product(int K, int M, double eta, int n);

// (floor((eta K - M) / (M (1 + eta))) + 1) * M
int argmax_s(int K, int M, double eta);
// Every n attaining max S(n), by direct scan.
std::vector<int> argmax_s_exhaustive(int K, int M, double eta);

struct LatticeCount {
  long long exact = 0;
  double lower = 0.0;
  double upper = 0.0;
};
// Integer points x in Z^d with |x| <= R.
LatticeCount lattice_ball_count(int d, int R);

struct TCharacterization {
  std::vector<std::vector<int>> exact;  // compositions with multinomial >= s * balanced
  std::vector<std::vector<int>> inner;  // |a - K/M|^2 <= (K/M) ln(1/s)
  std::vector<std::vector<int>> outer;  // |a - K/M|^2 <= 4 K ln(1/s)
  bool inner_in_exact = true;
  bool exact_in_outer = true;
};
TCharacterization characterize_T(int K, int M, double s);

struct BinomEtaCount {
  int exact = 0;
  double upper = 0.0;  // NaN when ln(1/s) <= 1, where the bound is undefined
  bool bound_defined = false;
};
// Counts n with C(K,n) eta^n >= s * max_n' C(K,n') eta^n'.
BinomEtaCount count_nonneg_binom_eta(int K, double eta, double s);

struct SummandCount {
  long long exact = 0;
  long long max_multiplicity = 0;  // summands attaining the maximum
  double upper = 0.0;
  double lower = 0.0;
  bool upper_hypothesis = false;  // eta K / (1 + eta) >= M - 1
  bool lower_hypothesis = false;  // K / (1 + eta) >= M^2
};
// F(n,a,b) = C(K,n) eta^n multinomial(n;a) multinomial(K-n;b) over all
// n and compositions a of n, b of K-n into M parts.
SummandCount count_nonneg_summands(int K, int M, double eta, double s, unsigned threads = 1);

// Log of the largest F over the index set, and of the F-ratio of the
// largest value strictly below it (both by enumeration).
struct SummandExtremes {
  double log_max = 0.0;
  double log_second = 0.0;
};
SummandExtremes summand_extremes(int K, int M, double eta);

struct BoundInstance {
  int L = 4;
  int d_x = 3;
  int N = 2;
  int H = 1;
  double eta = 0.5;
  double lambda_min = 1.0;
  double lambda_max = 1.0;
  double epsilon = 1.0;
  double M_bound = 1.0;
};

struct TheoremB1Result {
  LogNumber bound;
  bool hypotheses_ok = true;
  std::vector<std::string> violations;
};

// 2C(L)+1 = 3^L.
double degree_budget(int L);

TheoremB1Result theorem_b1_bound(const BoundInstance& inst);

}  // namespace icb::combinatorics
