#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "icb/attention/weights.hpp"

namespace icb::seprank {

// Barycentric interpolation through Chebyshev nodes of the first kind on [-1, 1].
class ChebyshevInterpolant {
 public:
  ChebyshevInterpolant(int degree, const std::function<double(double)>& f);
  double operator()(double t) const;
  static std::vector<double> nodes(int degree);

 private:
  std::vector<double> nodes_;
  std::vector<double> weights_;
  std::vector<double> values_;
};

struct DegreeTrial {
  int position = 0;
  int coordinate = 0;
  double scale = 0.0;             // max |f| over nodes and held-out points
  double residual_full = 0.0;     // degree 3^L fit, relative to scale
  double residual_reduced = 0.0;  // degree 3^L - 1 fit, relative to scale
  int detected_degree = 0;        // smallest degree whose fit meets the tolerance
};

struct PolynomialDegreeReport {
  int degree_bound = 0;  // 3^L
  double tolerance = 1e-9;
  double max_residual_full = 0.0;
  double min_residual_reduced = 0.0;
  int max_detected_degree = 0;
  bool pass = false;  // every full-degree residual below tolerance
  std::vector<DegreeTrial> trials;
};

// Restricts the depth-L output over 2N input embeddings to random affine
// lines t -> x0 + t*dir, t in [-1, 1], and fits polynomials along each line.
PolynomialDegreeReport polynomial_degree_check(const attention::NetworkWeights& w, int trials,
                                               std::uint64_t seed, double tolerance = 1e-9);

}  // namespace icb::seprank
