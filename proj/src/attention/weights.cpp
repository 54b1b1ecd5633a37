#include "icb/attention/weights.hpp"

#include <cmath>
#include <string>

#include "icb/common/errors.hpp"
#include "icb/common/random.hpp"

namespace icb::attention {

void HyperParams::validate() const {
  auto fail = [](const std::string& what) { throw InputError("hyper-parameters: " + what); };
  if (layers < 1) fail("L must be >= 1");
  if (heads < 1) fail("H must be >= 1");
  if (model_dim < 1 || head_dim < 1) fail("widths must be >= 1");
  if (head_dim * heads != model_dim) fail("d_a * H must equal d_x");
  if (sentence_len < 2) fail("N must be >= 2");
  if (vocab_size < 2) fail("V must be >= 2");
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) fail("eta must be > 0");
}

HyperParams make_hyper(int layers, int heads, int model_dim, int sentence_len,
                       int vocab_size, double learning_rate) {
  HyperParams h;
  h.layers = layers;
  h.heads = heads;
  h.model_dim = model_dim;
  h.head_dim = heads > 0 ? model_dim / heads : 0;
  h.sentence_len = sentence_len;
  h.vocab_size = vocab_size;
  h.learning_rate = learning_rate;
  h.validate();
  return h;
}

std::vector<Matrix*> TensorSet::tensors() {
  std::vector<Matrix*> out;
  for (auto& layer : layers)
    for (auto& h : layer) {
      out.push_back(&h.key);
      out.push_back(&h.query);
      out.push_back(&h.value);
      out.push_back(&h.output);
    }
  out.push_back(&vocab);
  return out;
}

std::vector<const Matrix*> TensorSet::tensors() const {
  std::vector<const Matrix*> out;
  for (const auto& layer : layers)
    for (const auto& h : layer) {
      out.push_back(&h.key);
      out.push_back(&h.query);
      out.push_back(&h.value);
      out.push_back(&h.output);
    }
  out.push_back(&vocab);
  return out;
}

std::size_t TensorSet::parameter_count() const {
  std::size_t n = 0;
  for (const Matrix* m : tensors()) n += m->size();
  return n;
}

bool TensorSet::all_finite() const {
  for (const Matrix* m : tensors())
    for (double v : m->values())
      if (!std::isfinite(v)) return false;
  return true;
}

bool operator==(const TensorSet& a, const TensorSet& b) {
  auto ta = a.tensors();
  auto tb = b.tensors();
  if (ta.size() != tb.size()) return false;
  for (std::size_t i = 0; i < ta.size(); ++i)
    if (!(*ta[i] == *tb[i])) return false;
  return true;
}

namespace {

void shape(TensorSet& t, const HyperParams& h) {
  const auto da = static_cast<std::size_t>(h.head_dim);
  const auto dx = static_cast<std::size_t>(h.model_dim);
  t.layers.assign(h.layers, std::vector<HeadWeights>(h.heads));
  for (auto& layer : t.layers)
    for (auto& head : layer) {
      head.key = Matrix(da, dx);
      head.query = Matrix(da, dx);
      head.value = Matrix(da, dx);
      head.output = Matrix(dx, da);
    }
  t.vocab = Matrix(dx, static_cast<std::size_t>(h.vocab_size));
}

}  // namespace

NetworkWeights NetworkWeights::zeros(const HyperParams& hyper) {
  hyper.validate();
  NetworkWeights w;
  w.hyper = hyper;
  shape(w, hyper);
  return w;
}

NetworkWeights NetworkWeights::random(const HyperParams& hyper, double lambda_min,
                                      double lambda_max, std::uint64_t seed) {
  if (!(lambda_min > 0.0) || !(lambda_min <= lambda_max))
    throw InputError("weight init: need 0 < lambda_min <= lambda_max");
  NetworkWeights w = zeros(hyper);
  Rng rng(seed);
  for (Matrix* m : w.tensors())
    for (double& v : m->values()) {
      const double mag = rng.uniform(lambda_min, lambda_max);
      v = (rng.next() & 1u) ? mag : -mag;
    }
  return w;
}

bool NetworkWeights::magnitudes_within(double lambda_min, double lambda_max) const {
  for (const Matrix* m : tensors())
    for (double v : m->values())
      if (std::abs(v) < lambda_min || std::abs(v) > lambda_max) return false;
  return true;
}

GradientBundle GradientBundle::zeros_like(const NetworkWeights& w) {
  GradientBundle g;
  shape(g, w.hyper);
  return g;
}

bool GradientBundle::matches(const NetworkWeights& w) const {
  auto a = tensors();
  auto b = w.tensors();
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i)
    if (!a[i]->same_shape(*b[i])) return false;
  return true;
}

}  // namespace icb::attention
