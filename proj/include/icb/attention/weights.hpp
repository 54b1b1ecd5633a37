#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "icb/common/matrix.hpp"

namespace icb::attention {

struct HyperParams {
  int layers = 1;       // L
  int heads = 1;        // H
  int model_dim = 2;    // d_x
  int head_dim = 2;     // d_a
  int sentence_len = 2; // N
  int vocab_size = 2;   // V
  double learning_rate = 1e-2;

  void validate() const;  // throws InputError
  friend bool operator==(const HyperParams&, const HyperParams&) = default;
};

// Builds HyperParams with head_dim = model_dim / heads.
HyperParams make_hyper(int layers, int heads, int model_dim, int sentence_len,
                       int vocab_size, double learning_rate = 1e-2);

struct HeadWeights {
  Matrix key;     // d_a x d_x
  Matrix query;   // d_a x d_x
  Matrix value;   // d_a x d_x
  Matrix output;  // d_x x d_a
};

// Layer/head tensors plus the vocabulary matrix, in the canonical order
// (per layer, per head: K, Q, V, O; then M^V).
struct TensorSet {
  std::vector<std::vector<HeadWeights>> layers;
  Matrix vocab;  // d_x x V

  std::vector<Matrix*> tensors();
  std::vector<const Matrix*> tensors() const;
  std::size_t parameter_count() const;
  bool all_finite() const;
  friend bool operator==(const TensorSet&, const TensorSet&);
};

struct NetworkWeights : TensorSet {
  HyperParams hyper;

  static NetworkWeights zeros(const HyperParams& hyper);
  // Entries uniform in [lambda_min, lambda_max] with independent random signs.
  static NetworkWeights random(const HyperParams& hyper, double lambda_min,
                               double lambda_max, std::uint64_t seed);

  bool magnitudes_within(double lambda_min, double lambda_max) const;
};

struct GradientBundle : TensorSet {
  static GradientBundle zeros_like(const NetworkWeights& w);
  bool matches(const NetworkWeights& w) const;
};

struct SentencePair {
  std::vector<int> first;
  std::vector<int> second;
};

struct AssociationVectors {
  Vector a;
  Vector b;
};

}  // namespace icb::attention
