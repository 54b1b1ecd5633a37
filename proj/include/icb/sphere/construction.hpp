#pragma once

#include <cstdint>
#include <vector>

#include "icb/attention/weights.hpp"

namespace icb::sphere {

// phi(j) = floor((j-1)/d_a) (d_a - 1) + ((j-1) mod d_a) + 1, one-based.
int phi(int j, int head_dim);

struct Layer1Construction {
  attention::NetworkWeights weights;  // all-ones vocabulary, layer-1 K = Q = e_1 e_{d_a}^T
  std::vector<Vector> templates;      // 2n + 1 templates
  int d = 0;                          // (d_x - H) / 2
  int n = 0;                          // rows of A
  int half = 0;                       // floor((d_a - 1) / 2)
  double max_deviation = 0.0;         // over all (j1, j2), positions and coordinates
  bool pass = false;                  // max_deviation < 1e-12
};

// u for the input (j1, j2 + n), zero-based j1, j2.
Vector construction_u(const Matrix& A, int j1, int j2, const attention::HyperParams& hyper);

// Builds the layer-1 assignment for A (n x d, unit rows), runs the attention
// layer on every template pair, and compares against (sum_h O V) u. Value and
// output matrices are seeded random.
Layer1Construction lower_bound_layer1_construction(const Matrix& A,
                                                   const attention::HyperParams& hyper,
                                                   std::uint64_t seed);

}  // namespace icb::sphere
