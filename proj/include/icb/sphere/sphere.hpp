#pragma once

#include <cstdint>
#include <vector>

#include "icb/common/matrix.hpp"

namespace icb::sphere {

// n points on the unit sphere S^d in R^{d+1}.
struct SpherePointSet {
  int d = 1;
  int n = 0;
  std::vector<Vector> points;
  std::uint64_t seed = 0;
};

// Normalized standard Gaussian vectors; point k uses the substream (seed, k).
SpherePointSet sample_sphere(int d, int n, std::uint64_t seed, unsigned threads = 1);

// ln C(d + lambda - 1, lambda)
double log_multiset(int d, double lambda);

struct McEstimate {
  double estimate = 0.0;
  double std_error = 0.0;
};

// E[<u,v>^{2 lambda}] for independent uniform u, v on S^d. By rotational
// invariance v can be fixed to e_1, so each draw needs one sample.
McEstimate mc_cosine_power_expectation(int d, int lambda, long long samples, std::uint64_t seed,
                                       unsigned threads = 1);
// Same expectation drawing both u and v.
McEstimate mc_cosine_power_pairs(int d, int lambda, long long samples, std::uint64_t seed,
                                 unsigned threads = 1);

// (d + 1) * multiset(d, lambda)^{-1/2}
double cosine_power_bound(int d, int lambda);

struct IntegrandCheck {
  bool pass = false;
  double max_ratio = 0.0;   // max of x^{2 lambda} (1 - x^2)^{d/2} over the bound
  double critical_x = 0.0;  // sqrt(2 lambda / (2 lambda + d))
  double bound = 0.0;       // multiset(d, lambda)^{-1/2}
};

// Uniform grid on [0, 1] plus the analytic critical point. Requires lambda >= d.
IntegrandCheck integrand_bound_check(int d, int lambda, int grid_points);

struct HadamardGram {
  Matrix base;  // unit rows
  int power = 1;
  Matrix gram;  // (B B^T) raised entrywise to `power`
};

HadamardGram hadamard_power_gram(const Matrix& rows, int lambda);
HadamardGram hadamard_power_gram(const SpherePointSet& points, int lambda);

struct FrobeniusCheck {
  double mc_mean = 0.0;
  double std_error = 0.0;
  double bound = 0.0;  // sqrt(d + 1) * multiset(d, lambda)^{3/4}
  int trials = 0;
  bool pass = false;   // mean <= bound + 3 std_error
};

// Rows of B drawn uniformly from S^d. Requires lambda >= d.
FrobeniusCheck frobenius_expectation_check(int d, int lambda, int n, int trials,
                                           std::uint64_t seed, unsigned threads = 1);

struct SpectralCount {
  int r = 0;              // eigenvalues >= 1/n
  double floor = 0.0;     // (n - 1) / |M|_F
  double frobenius = 0.0;
  bool holds = false;
};

// Requires a symmetric matrix with unit diagonal.
SpectralCount spectral_count_check(const Matrix& m);
SpectralCount spectral_count_check(const HadamardGram& gram);

}  // namespace icb::sphere
