#include <gtest/gtest.h>

#include <atomic>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "icb/common/numeric.hpp"
#include "icb/common/parallel.hpp"
#include "icb/common/random.hpp"

namespace icb {
namespace {

TEST(DeriveSeed, MatchesSplitmixReference) {
  // First splitmix64 output for state 0 is 0xE220A8397B1DCDAF.
  EXPECT_EQ(derive_seed(0, 0), 16294208416658607535ULL);
  EXPECT_EQ(derive_seed(42, 7), 14769051326987775908ULL);
  EXPECT_EQ(derive_seed(~0ULL, 3), 7862637804313477842ULL);
}

TEST(DeriveSeed, StreamsDiffer) {
  EXPECT_NE(derive_seed(1, 0), derive_seed(1, 1));
  EXPECT_NE(derive_seed(1, 0), derive_seed(2, 0));
}

TEST(Rng, EngineIsStandardMt64) {
  Rng r(5489);
  std::uint64_t x = 0;
  for (int i = 0; i < 10000; ++i) x = r.next();
  EXPECT_EQ(x, 9981545732273789042ULL);
}

TEST(Rng, UniformRangeAndMean) {
  Rng r(3);
  double sum = 0.0;
  const int n = 200000;
  for (int i = 0; i < n; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    sum += u;
  }
  EXPECT_NEAR(sum / n, 0.5, 4.0 * std::sqrt(1.0 / 12.0 / n));
}

TEST(Rng, NormalMoments) {
  Rng r(9);
  const int n = 200000;
  double s1 = 0.0, s2 = 0.0;
  for (int i = 0; i < n; ++i) {
    const double z = r.normal();
    s1 += z;
    s2 += z * z;
  }
  EXPECT_NEAR(s1 / n, 0.0, 4.0 / std::sqrt(n));
  EXPECT_NEAR(s2 / n, 1.0, 4.0 * std::sqrt(2.0 / n));
}

TEST(Rng, BelowCoversRangeEvenly) {
  Rng r(11);
  std::vector<int> counts(7, 0);
  for (int i = 0; i < 70000; ++i) ++counts[r.below(7)];
  for (int c : counts) EXPECT_NEAR(c, 10000, 450);
  EXPECT_EQ(r.below(0), 0u);
  EXPECT_EQ(r.below(1), 0u);
}

TEST(Rng, ShuffleIsPermutationAndSeeded) {
  std::vector<int> a(50), b;
  std::iota(a.begin(), a.end(), 0);
  b = a;
  Rng r1(5), r2(5);
  r1.shuffle(a);
  r2.shuffle(b);
  EXPECT_EQ(a, b);
  auto sorted = a;
  std::sort(sorted.begin(), sorted.end());
  for (int i = 0; i < 50; ++i) EXPECT_EQ(sorted[i], i);
}

TEST(CompensatedSum, RecoversCancellation) {
  CompensatedSum s;
  s.add(1.0);
  s.add(1e100);
  s.add(1.0);
  s.add(-1e100);
  EXPECT_EQ(s.value(), 2.0);

  std::vector<double> xs(1000000, 0.1);
  EXPECT_NEAR(compensated_total(xs), 100000.0, 1e-9);
}

TEST(Numeric, MatrixProducts) {
  Matrix a(2, 3);
  a(0, 0) = 1; a(0, 1) = 2; a(0, 2) = 3;
  a(1, 0) = 4; a(1, 1) = 5; a(1, 2) = 6;
  const Vector x{1, 0, -1};
  EXPECT_EQ(mat_vec(a, x), (Vector{-2, -2}));
  EXPECT_EQ(mat_t_vec(a, Vector{1, 1}), (Vector{5, 7, 9}));
  const Matrix p = mat_mul(a, a.transposed());
  EXPECT_EQ(p(0, 0), 14);
  EXPECT_EQ(p(0, 1), 32);
  EXPECT_EQ(p(1, 1), 77);
  EXPECT_DOUBLE_EQ(frobenius_norm(a), std::sqrt(91.0));
  EXPECT_EQ(max_abs(a), 6.0);
}

TEST(Numeric, FrobeniusScaledAgainstOverflow) {
  Matrix m(1, 2, 1e200);
  EXPECT_DOUBLE_EQ(frobenius_norm(m), std::sqrt(2.0) * 1e200);
}

TEST(Parallel, VisitsEachIndexOnce) {
  for (unsigned threads : {1u, 2u, 5u}) {
    std::vector<std::atomic<int>> hits(1000);
    parallel_for(hits.size(), threads, [&](std::size_t i) { hits[i]++; });
    for (const auto& h : hits) EXPECT_EQ(h.load(), 1);
  }
}

TEST(Parallel, PropagatesExceptions) {
  EXPECT_THROW(parallel_for(100, 3,
                            [](std::size_t i) {
                              if (i == 37) throw std::runtime_error("boom");
                            }),
               std::runtime_error);
}

}  // namespace
}  // namespace icb
