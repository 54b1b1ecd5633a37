#pragma once

#include <span>
#include <vector>

#include "icb/attention/weights.hpp"

namespace icb::attention {

enum class Mode { in_context, sequential };

const char* mode_name(Mode m);

Vector embed(int token, const NetworkWeights& w);

// One attention layer (no softmax, no nonlinearity). With causal set,
// position i only attends to j <= i.
std::vector<Vector> layer_forward(std::span<const Vector> inputs, int layer,
                                  const NetworkWeights& w, bool causal = false);

// All L layers applied to already-embedded inputs.
std::vector<Vector> forward(std::span<const Vector> inputs, const NetworkWeights& w,
                            bool causal = false);

// Embeds tokens, multiplying the embedding of token t by markers[t] when
// markers is non-empty (markers[t] empty means unmarked).
std::vector<Vector> embed_sequence(std::span<const int> tokens, const NetworkWeights& w,
                                   std::span<const Vector> markers = {});

double in_context_rep(const SentencePair& pair, const NetworkWeights& w, int i, int p);

struct LossOptions {
  bool causal = false;
  // Per-token embedding markers; empty for the plain loss.
  std::vector<Vector> markers;
};

double autoregressive_loss(std::span<const int> sentence, const NetworkWeights& w,
                           const LossOptions& opts = {});

GradientBundle analytic_gradient(std::span<const int> sentence, const NetworkWeights& w,
                                 const LossOptions& opts = {});

NetworkWeights sgd_step(const NetworkWeights& w, const GradientBundle& g, double eta);

double sequential_rep(const SentencePair& pair, const NetworkWeights& w, double eta,
                      int i, int p);

double associated_eval(Mode mode, const SentencePair& pair, const NetworkWeights& w,
                       double eta, const AssociationVectors& assoc, int i, int p);

// Weights after one a-marked step on the first sentence; shared by every
// b-template in a grid row.
NetworkWeights sequential_updated_weights(const SentencePair& pair, const NetworkWeights& w,
                                          double eta, std::span<const double> a);

void validate_pair(const SentencePair& pair, const HyperParams& hyper);

}  // namespace icb::attention
