#include "icb/seprank/polynomial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "icb/attention/network.hpp"
#include "icb/common/errors.hpp"
#include "icb/common/random.hpp"

namespace icb::seprank {

std::vector<double> ChebyshevInterpolant::nodes(int degree) {
  std::vector<double> x(static_cast<std::size_t>(degree) + 1);
  for (int j = 0; j <= degree; ++j)
    x[static_cast<std::size_t>(j)] =
        std::cos((2.0 * j + 1.0) * std::numbers::pi / (2.0 * degree + 2.0));
  return x;
}

ChebyshevInterpolant::ChebyshevInterpolant(int degree, const std::function<double(double)>& f)
    : nodes_(nodes(degree)) {
  if (degree < 0) throw InputError("interpolant degree must be >= 0");
  for (int j = 0; j <= degree; ++j) {
    const double sign = (j % 2 == 0) ? 1.0 : -1.0;
    weights_.push_back(sign * std::sin((2.0 * j + 1.0) * std::numbers::pi / (2.0 * degree + 2.0)));
    values_.push_back(f(nodes_[static_cast<std::size_t>(j)]));
  }
}

double ChebyshevInterpolant::operator()(double t) const {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    const double diff = t - nodes_[j];
    if (diff == 0.0) return values_[j];
    const double c = weights_[j] / diff;
    num += c * values_[j];
    den += c;
  }
  return num / den;
}

PolynomialDegreeReport polynomial_degree_check(const attention::NetworkWeights& w, int trials,
                                               std::uint64_t seed, double tolerance) {
  if (trials < 1) throw InputError("polynomial_degree_check: trials must be >= 1");
  const int L = w.hyper.layers;
  if (L > 4) throw BudgetError("polynomial_degree_check: 3^L nodes affordable only for L <= 4");
  const int degree = static_cast<int>(std::lround(std::pow(3.0, L)));
  const std::size_t positions = 2 * static_cast<std::size_t>(w.hyper.sentence_len);
  const auto dx = static_cast<std::size_t>(w.hyper.model_dim);
  constexpr int kHeldOut = 8;

  PolynomialDegreeReport report;
  report.degree_bound = degree;
  report.tolerance = tolerance;
  report.min_residual_reduced = INFINITY;

  for (int trial = 0; trial < trials; ++trial) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(trial)));
    std::vector<Vector> base(positions, Vector(dx)), dir(positions, Vector(dx));
    for (auto& x : base)
      for (double& v : x) v = rng.normal();
    for (auto& x : dir)
      for (double& v : x) v = rng.normal();
    DegreeTrial t;
    t.position = static_cast<int>(rng.below(positions));
    t.coordinate = static_cast<int>(rng.below(dx));
    std::vector<double> held(kHeldOut);
    for (double& h : held) h = rng.uniform(-1.0, 1.0);

    auto f = [&](double s) {
      std::vector<Vector> x(base);
      for (std::size_t i = 0; i < positions; ++i)
        for (std::size_t r = 0; r < dx; ++r) x[i][r] += s * dir[i][r];
      auto y = attention::forward(x, w);
      return y[static_cast<std::size_t>(t.position)][static_cast<std::size_t>(t.coordinate)];
    };

    std::vector<double> truth;
    for (double h : held) truth.push_back(f(h));
    for (double v : truth) t.scale = std::max(t.scale, std::abs(v));
    for (double node : ChebyshevInterpolant::nodes(degree)) t.scale = std::max(t.scale, std::abs(f(node)));

    auto residual = [&](int k) {
      if (t.scale == 0.0) return 0.0;
      ChebyshevInterpolant p(k, f);
      double worst = 0.0;
      for (std::size_t h = 0; h < held.size(); ++h)
        worst = std::max(worst, std::abs(p(held[h]) - truth[h]));
      return worst / t.scale;
    };
    t.residual_full = residual(degree);
    t.residual_reduced = residual(degree - 1);
    t.detected_degree = degree;
    for (int k = 0; k <= degree; ++k)
      if (residual(k) < tolerance) {
        t.detected_degree = k;
        break;
      }

    report.max_residual_full = std::max(report.max_residual_full, t.residual_full);
    report.min_residual_reduced = std::min(report.min_residual_reduced, t.residual_reduced);
    report.max_detected_degree = std::max(report.max_detected_degree, t.detected_degree);
    report.trials.push_back(t);
  }
  report.pass = report.max_residual_full < tolerance;
  return report;
}

}  // namespace icb::seprank
