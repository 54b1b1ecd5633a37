#include "icb/sphere/sphere.hpp"

#include <algorithm>
#include <cmath>

#include "icb/common/errors.hpp"
#include "icb/common/numeric.hpp"
#include "icb/common/parallel.hpp"
#include "icb/common/random.hpp"
#include "icb/seprank/spectrum.hpp"

namespace icb::sphere {

namespace {

constexpr long long kChunk = 4096;

Vector unit_gaussian(Rng& rng, int dim) {
  Vector x(static_cast<std::size_t>(dim));
  double norm = 0.0;
  while (norm == 0.0) {
    for (double& v : x) v = rng.normal();
    norm = std::sqrt(compensated_dot(x, x));
  }
  for (double& v : x) v /= norm;
  return x;
}

// Mean and standard error of per-draw values produced chunk by chunk; each
// chunk owns a substream so the result is independent of the thread count.
template <class Draw>
McEstimate chunked_mean(long long samples, std::uint64_t seed, unsigned threads, Draw draw) {
  if (samples < 2) throw InputError("Monte Carlo needs at least 2 samples");
  const auto chunks = static_cast<std::size_t>((samples + kChunk - 1) / kChunk);
  std::vector<double> sums(chunks), squares(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Rng rng(derive_seed(seed, c));
    const long long begin = static_cast<long long>(c) * kChunk;
    const long long end = std::min(samples, begin + kChunk);
    CompensatedSum s, q;
    for (long long k = begin; k < end; ++k) {
      const double v = draw(rng);
      s.add(v);
      q.add(v * v);
    }
    sums[c] = s.value();
    squares[c] = q.value();
  });
  const double n = static_cast<double>(samples);
  const double mean = compensated_total(sums) / n;
  const double var = std::max(0.0, (compensated_total(squares) - n * mean * mean) / (n - 1.0));
  return {mean, std::sqrt(var / n)};
}

void check_dims(int d, int lambda) {
  if (d < 1) throw InputError("sphere dimension d must be >= 1");
  if (lambda < 1) throw InputError("lambda must be >= 1");
}

}  // namespace

SpherePointSet sample_sphere(int d, int n, std::uint64_t seed, unsigned threads) {
  if (d < 1 || n < 1) throw InputError("sample_sphere: need d >= 1, n >= 1");
  SpherePointSet s;
  s.d = d;
  s.n = n;
  s.seed = seed;
  s.points.resize(static_cast<std::size_t>(n));
  parallel_for(s.points.size(), threads, [&](std::size_t k) {
    Rng rng(derive_seed(seed, k));
    s.points[k] = unit_gaussian(rng, d + 1);
  });
  return s;
}

double log_multiset(int d, double lambda) {
  if (d < 1 || lambda < 0) throw InputError("log_multiset: need d >= 1, lambda >= 0");
  return std::lgamma(d + lambda) - std::lgamma(lambda + 1.0) - std::lgamma(static_cast<double>(d));
}

McEstimate mc_cosine_power_expectation(int d, int lambda, long long samples, std::uint64_t seed,
                                       unsigned threads) {
  check_dims(d, lambda);
  return chunked_mean(samples, seed, threads, [&](Rng& rng) {
    const Vector u = unit_gaussian(rng, d + 1);
    return std::pow(u[0], 2 * lambda);
  });
}

McEstimate mc_cosine_power_pairs(int d, int lambda, long long samples, std::uint64_t seed,
                                 unsigned threads) {
  check_dims(d, lambda);
  return chunked_mean(samples, seed, threads, [&](Rng& rng) {
    const Vector u = unit_gaussian(rng, d + 1);
    const Vector v = unit_gaussian(rng, d + 1);
    return std::pow(compensated_dot(u, v), 2 * lambda);
  });
}

double cosine_power_bound(int d, int lambda) {
  check_dims(d, lambda);
  return (d + 1.0) * std::exp(-0.5 * log_multiset(d, lambda));
}

IntegrandCheck integrand_bound_check(int d, int lambda, int grid_points) {
  check_dims(d, lambda);
  if (lambda < d) throw HypothesisError("integrand bound requires lambda >= d");
  if (grid_points < 2) throw InputError("integrand_bound_check: need at least 2 grid points");
  IntegrandCheck out;
  out.bound = std::exp(-0.5 * log_multiset(d, lambda));
  out.critical_x = std::sqrt(2.0 * lambda / (2.0 * lambda + d));
  auto f = [&](double x) {
    return std::pow(x, 2 * lambda) * std::pow(std::max(0.0, 1.0 - x * x), 0.5 * d);
  };
  double worst = f(out.critical_x);
  for (int i = 0; i < grid_points; ++i)
    worst = std::max(worst, f(static_cast<double>(i) / (grid_points - 1)));
  out.max_ratio = worst / out.bound;
  out.pass = out.max_ratio <= 1.0;
  return out;
}

HadamardGram hadamard_power_gram(const Matrix& rows, int lambda) {
  if (lambda < 1) throw InputError("hadamard_power_gram: lambda must be >= 1");
  const std::size_t n = rows.rows();
  for (std::size_t i = 0; i < n; ++i) {
    const double norm = std::sqrt(compensated_dot(rows.row(i), rows.row(i)));
    if (std::abs(norm - 1.0) > 1e-10)
      throw InputError("hadamard_power_gram: row " + std::to_string(i) + " is not unit length");
  }
  HadamardGram g;
  g.base = rows;
  g.power = lambda;
  g.gram = Matrix(n, n);
  for (std::size_t i = 0; i < n; ++i) {
    g.gram(i, i) = 1.0;
    for (std::size_t j = i + 1; j < n; ++j) {
      const double c = std::clamp(compensated_dot(rows.row(i), rows.row(j)), -1.0, 1.0);
      g.gram(i, j) = g.gram(j, i) = std::pow(c, lambda);
    }
  }
  return g;
}

HadamardGram hadamard_power_gram(const SpherePointSet& points, int lambda) {
  Matrix rows(points.points.size(), static_cast<std::size_t>(points.d + 1));
  for (std::size_t i = 0; i < points.points.size(); ++i)
    std::copy(points.points[i].begin(), points.points[i].end(), rows.row(i).begin());
  return hadamard_power_gram(rows, lambda);
}

FrobeniusCheck frobenius_expectation_check(int d, int lambda, int n, int trials,
                                           std::uint64_t seed, unsigned threads) {
  check_dims(d, lambda);
  if (lambda < d) throw HypothesisError("Frobenius expectation bound requires lambda >= d");
  if (n < 1 || trials < 2) throw InputError("frobenius_expectation_check: need n >= 1, trials >= 2");
  std::vector<double> norms(static_cast<std::size_t>(trials));
  parallel_for(norms.size(), threads, [&](std::size_t t) {
    const auto points = sample_sphere(d, n, derive_seed(seed, t));
    norms[t] = frobenius_norm(hadamard_power_gram(points, lambda).gram);
  });
  FrobeniusCheck out;
  out.trials = trials;
  const double m = static_cast<double>(trials);
  out.mc_mean = compensated_total(norms) / m;
  CompensatedSum var;
  for (double v : norms) var.add((v - out.mc_mean) * (v - out.mc_mean));
  out.std_error = std::sqrt(var.value() / (m - 1.0) / m);
  out.bound = std::sqrt(d + 1.0) * std::exp(0.75 * log_multiset(d, lambda));
  out.pass = out.mc_mean <= out.bound + 3.0 * out.std_error;
  return out;
}

SpectralCount spectral_count_check(const Matrix& m) {
  if (!seprank::is_symmetric(m)) throw InputError("spectral_count_check: matrix is not symmetric");
  const std::size_t n = m.rows();
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(m(i, i) - 1.0) > 1e-12)
      throw InputError("spectral_count_check: diagonal entries must equal 1");
  const auto eig = seprank::symmetric_eigendecomposition(m);
  SpectralCount out;
  const double cut = 1.0 / static_cast<double>(n);
  for (double v : eig.values)
    if (v >= cut) ++out.r;
  out.frobenius = frobenius_norm(m);
  out.floor = (static_cast<double>(n) - 1.0) / out.frobenius;
  out.holds = out.r >= out.floor;
  return out;
}

SpectralCount spectral_count_check(const HadamardGram& gram) {
  return spectral_count_check(gram.gram);
}

}  // namespace icb::sphere
