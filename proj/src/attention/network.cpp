#include "icb/attention/network.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "icb/common/errors.hpp"
#include "icb/common/numeric.hpp"

namespace icb::attention {

const char* mode_name(Mode m) {
  return m == Mode::in_context ? "in_context" : "sequential";
}

Vector embed(int token, const NetworkWeights& w) {
  if (token < 0 || token >= w.hyper.vocab_size)
    throw InputError("embed: token id " + std::to_string(token) + " out of range");
  Vector x(w.vocab.rows());
  for (std::size_t r = 0; r < x.size(); ++r) x[r] = w.vocab(r, static_cast<std::size_t>(token));
  return x;
}

std::vector<Vector> embed_sequence(std::span<const int> tokens, const NetworkWeights& w,
                                   std::span<const Vector> markers) {
  if (!markers.empty() && markers.size() != tokens.size())
    throw InputError("embed_sequence: marker count must match token count");
  std::vector<Vector> xs;
  xs.reserve(tokens.size());
  for (std::size_t t = 0; t < tokens.size(); ++t) {
    Vector x = embed(tokens[t], w);
    if (!markers.empty() && !markers[t].empty()) {
      if (markers[t].size() != x.size()) throw InputError("embed_sequence: marker width");
      for (std::size_t r = 0; r < x.size(); ++r) x[r] *= markers[t][r];
    }
    xs.push_back(std::move(x));
  }
  return xs;
}

namespace {

// Activations of one head kept for the backward pass.
struct HeadTrace {
  std::vector<Vector> q, k, v, c;
  Matrix scores;  // N' x N'
};

struct LayerTrace {
  std::vector<Vector> inputs;
  std::vector<HeadTrace> heads;
};

void check_layer(int layer, const NetworkWeights& w) {
  if (layer < 0 || layer >= static_cast<int>(w.layers.size()))
    throw InputError("layer index " + std::to_string(layer) + " out of range");
}

std::vector<Vector> run_layer(std::span<const Vector> g, int layer, const NetworkWeights& w,
                              bool causal, LayerTrace* trace) {
  check_layer(layer, w);
  const std::size_t n = g.size();
  const std::size_t dx = w.vocab.rows();
  for (const auto& x : g)
    if (x.size() != dx) throw InputError("layer_forward: input width mismatch");

  const auto& heads = w.layers[static_cast<std::size_t>(layer)];
  std::vector<HeadTrace> local(heads.size());
  for (std::size_t h = 0; h < heads.size(); ++h) {
    HeadTrace& t = local[h];
    for (const auto& x : g) {
      t.q.push_back(mat_vec(heads[h].query, x));
      t.k.push_back(mat_vec(heads[h].key, x));
      t.v.push_back(mat_vec(heads[h].value, x));
    }
    t.scores = Matrix(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!causal || j <= i) t.scores(i, j) = compensated_dot(t.q[i], t.k[j]);
    const std::size_t da = heads[h].value.rows();
    for (std::size_t i = 0; i < n; ++i) {
      Vector c(da);
      for (std::size_t a = 0; a < da; ++a) {
        CompensatedSum s;
        for (std::size_t j = 0; j < n; ++j) s.add(t.scores(i, j) * t.v[j][a]);
        c[a] = s.value();
      }
      t.c.push_back(std::move(c));
    }
  }

  std::vector<Vector> out(n, Vector(dx));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t r = 0; r < dx; ++r) {
      CompensatedSum s;
      for (std::size_t h = 0; h < heads.size(); ++h) {
        const Matrix& o = heads[h].output;
        for (std::size_t a = 0; a < o.cols(); ++a) s.add(o(r, a) * local[h].c[i][a]);
      }
      out[i][r] = s.value();
    }

  if (trace) {
    trace->inputs.assign(g.begin(), g.end());
    trace->heads = std::move(local);
  }
  return out;
}

// Accumulates gradients of one layer into grads and returns d(inputs).
std::vector<Vector> back_layer(const LayerTrace& t, const std::vector<Vector>& dout,
                               int layer, const NetworkWeights& w, bool causal,
                               GradientBundle& grads) {
  const std::size_t n = t.inputs.size();
  const std::size_t dx = w.vocab.rows();
  const auto& heads = w.layers[static_cast<std::size_t>(layer)];
  auto& gheads = grads.layers[static_cast<std::size_t>(layer)];
  std::vector<Vector> dg(n, Vector(dx, 0.0));
  std::vector<std::vector<CompensatedSum>> dg_acc(n, std::vector<CompensatedSum>(dx));

  for (std::size_t h = 0; h < heads.size(); ++h) {
    const HeadWeights& hw = heads[h];
    const HeadTrace& ht = t.heads[h];
    HeadWeights& gw = gheads[h];
    const std::size_t da = hw.value.rows();

    std::vector<Vector> dc(n);
    for (std::size_t i = 0; i < n; ++i) dc[i] = mat_t_vec(hw.output, dout[i]);

    for (std::size_t r = 0; r < dx; ++r)
      for (std::size_t a = 0; a < da; ++a) {
        CompensatedSum s;
        s.add(gw.output(r, a));
        for (std::size_t i = 0; i < n; ++i) s.add(dout[i][r] * ht.c[i][a]);
        gw.output(r, a) = s.value();
      }

    Matrix ds(n, n);
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (!causal || j <= i) ds(i, j) = compensated_dot(dc[i], ht.v[j]);

    std::vector<Vector> dq(n, Vector(da)), dk(n, Vector(da)), dv(n, Vector(da));
    for (std::size_t j = 0; j < n; ++j)
      for (std::size_t a = 0; a < da; ++a) {
        CompensatedSum sv, sk, sq;
        for (std::size_t i = 0; i < n; ++i) {
          sv.add(ht.scores(i, j) * dc[i][a]);
          sk.add(ds(i, j) * ht.q[i][a]);
          sq.add(ds(j, i) * ht.k[i][a]);
        }
        dv[j][a] = sv.value();
        dk[j][a] = sk.value();
        dq[j][a] = sq.value();
      }

    auto accumulate_outer = [&](Matrix& target, const std::vector<Vector>& left) {
      for (std::size_t a = 0; a < da; ++a)
        for (std::size_t c = 0; c < dx; ++c) {
          CompensatedSum s;
          s.add(target(a, c));
          for (std::size_t i = 0; i < n; ++i) s.add(left[i][a] * t.inputs[i][c]);
          target(a, c) = s.value();
        }
    };
    accumulate_outer(gw.query, dq);
    accumulate_outer(gw.key, dk);
    accumulate_outer(gw.value, dv);

    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t c = 0; c < dx; ++c)
        for (std::size_t a = 0; a < da; ++a) {
          dg_acc[i][c].add(hw.query(a, c) * dq[i][a]);
          dg_acc[i][c].add(hw.key(a, c) * dk[i][a]);
          dg_acc[i][c].add(hw.value(a, c) * dv[i][a]);
        }
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t c = 0; c < dx; ++c) dg[i][c] = dg_acc[i][c].value();
  return dg;
}

void check_sentence(std::span<const int> s, const NetworkWeights& w) {
  if (s.size() < 2) throw InputError("sentence must have at least 2 tokens");
  for (int t : s)
    if (t < 0 || t >= w.hyper.vocab_size)
      throw InputError("token id " + std::to_string(t) + " out of range");
}

Vector logits_at(const Vector& y, const NetworkWeights& w) {
  return mat_t_vec(w.vocab, y);
}

double log_sum_exp(const Vector& z) {
  const double m = *std::max_element(z.begin(), z.end());
  CompensatedSum s;
  for (double v : z) s.add(std::exp(v - m));
  return m + std::log(s.value());
}

Vector marker_or_empty(std::span<const double> m, const NetworkWeights& w) {
  if (m.empty()) return {};
  if (m.size() != w.vocab.rows()) throw InputError("association vector width must equal d_x");
  return Vector(m.begin(), m.end());
}

}  // namespace

std::vector<Vector> layer_forward(std::span<const Vector> inputs, int layer,
                                  const NetworkWeights& w, bool causal) {
  return run_layer(inputs, layer, w, causal, nullptr);
}

std::vector<Vector> forward(std::span<const Vector> inputs, const NetworkWeights& w,
                            bool causal) {
  std::vector<Vector> g(inputs.begin(), inputs.end());
  for (int l = 0; l < static_cast<int>(w.layers.size()); ++l)
    g = run_layer(g, l, w, causal, nullptr);
  return g;
}

void validate_pair(const SentencePair& pair, const HyperParams& hyper) {
  if (pair.first.size() != pair.second.size())
    throw InputError("sentence pair: lengths differ");
  if (pair.first.size() < 2) throw InputError("sentence pair: need N >= 2");
  for (const auto* s : {&pair.first, &pair.second})
    for (int t : *s)
      if (t < 0 || t >= hyper.vocab_size)
        throw InputError("sentence pair: token id " + std::to_string(t) + " out of range");
}

double in_context_rep(const SentencePair& pair, const NetworkWeights& w, int i, int p) {
  return associated_eval(Mode::in_context, pair, w, 0.0, {}, i, p);
}

double autoregressive_loss(std::span<const int> sentence, const NetworkWeights& w,
                           const LossOptions& opts) {
  check_sentence(sentence, w);
  auto y = forward(embed_sequence(sentence, w, opts.markers), w, opts.causal);
  CompensatedSum loss;
  for (std::size_t j = 0; j + 1 < sentence.size(); ++j) {
    const Vector z = logits_at(y[j], w);
    loss.add(log_sum_exp(z) - z[static_cast<std::size_t>(sentence[j + 1])]);
  }
  return loss.value();
}

GradientBundle analytic_gradient(std::span<const int> sentence, const NetworkWeights& w,
                                 const LossOptions& opts) {
  check_sentence(sentence, w);
  const std::size_t n = sentence.size();
  const std::size_t dx = w.vocab.rows();
  const std::size_t vocab = w.vocab.cols();
  GradientBundle grads = GradientBundle::zeros_like(w);

  std::vector<LayerTrace> traces(w.layers.size());
  std::vector<Vector> g = embed_sequence(sentence, w, opts.markers);
  for (std::size_t l = 0; l < w.layers.size(); ++l)
    g = run_layer(g, static_cast<int>(l), w, opts.causal, &traces[l]);

  // Output head: logits = M^T y_j, target sentence[j+1].
  std::vector<Vector> dy(n, Vector(dx, 0.0));
  std::vector<std::vector<CompensatedSum>> dvocab(dx, std::vector<CompensatedSum>(vocab));
  for (std::size_t j = 0; j + 1 < n; ++j) {
    const Vector z = logits_at(g[j], w);
    const double lse = log_sum_exp(z);
    Vector dz(vocab);
    for (std::size_t v = 0; v < vocab; ++v) dz[v] = std::exp(z[v] - lse);
    dz[static_cast<std::size_t>(sentence[j + 1])] -= 1.0;
    for (std::size_t r = 0; r < dx; ++r)
      for (std::size_t v = 0; v < vocab; ++v) dvocab[r][v].add(g[j][r] * dz[v]);
    dy[j] = mat_vec(w.vocab, dz);
  }

  for (std::size_t l = w.layers.size(); l-- > 0;)
    dy = back_layer(traces[l], dy, static_cast<int>(l), w, opts.causal, grads);

  // Embedding lookup: x_t = M[:, w_t] (.* marker_t).
  for (std::size_t t = 0; t < n; ++t) {
    const auto col = static_cast<std::size_t>(sentence[t]);
    const bool marked = !opts.markers.empty() && !opts.markers[t].empty();
    for (std::size_t r = 0; r < dx; ++r)
      dvocab[r][col].add(marked ? dy[t][r] * opts.markers[t][r] : dy[t][r]);
  }
  for (std::size_t r = 0; r < dx; ++r)
    for (std::size_t v = 0; v < vocab; ++v) grads.vocab(r, v) = dvocab[r][v].value();
  return grads;
}

NetworkWeights sgd_step(const NetworkWeights& w, const GradientBundle& g, double eta) {
  if (!g.matches(w)) throw InputError("sgd_step: gradient shapes do not match weights");
  NetworkWeights out = w;
  if (eta == 0.0) return out;
  auto dst = out.tensors();
  auto src = g.tensors();
  for (std::size_t t = 0; t < dst.size(); ++t) {
    auto& d = dst[t]->values();
    const auto& s = src[t]->values();
    for (std::size_t k = 0; k < d.size(); ++k) d[k] -= eta * s[k];
  }
  return out;
}

NetworkWeights sequential_updated_weights(const SentencePair& pair, const NetworkWeights& w,
                                          double eta, std::span<const double> a) {
  validate_pair(pair, w.hyper);
  if (eta == 0.0) return w;
  LossOptions opts;
  const Vector marker = marker_or_empty(a, w);
  if (!marker.empty()) opts.markers.assign(pair.first.size(), marker);
  return sgd_step(w, analytic_gradient(pair.first, w, opts), eta);
}

double sequential_rep(const SentencePair& pair, const NetworkWeights& w, double eta,
                      int i, int p) {
  return associated_eval(Mode::sequential, pair, w, eta, {}, i, p);
}

double associated_eval(Mode mode, const SentencePair& pair, const NetworkWeights& w,
                       double eta, const AssociationVectors& assoc, int i, int p) {
  validate_pair(pair, w.hyper);
  const int n = static_cast<int>(pair.first.size());
  const int positions = mode == Mode::in_context ? 2 * n : n;
  if (i < 0 || i >= positions) throw InputError("output position out of range");
  if (p < 0 || p >= w.hyper.model_dim) throw InputError("output coordinate out of range");
  const Vector a = marker_or_empty(assoc.a, w);
  const Vector b = marker_or_empty(assoc.b, w);

  if (mode == Mode::in_context) {
    std::vector<int> tokens(pair.first);
    tokens.insert(tokens.end(), pair.second.begin(), pair.second.end());
    std::vector<Vector> markers;
    if (!a.empty() || !b.empty()) {
      markers.assign(n, a);
      markers.insert(markers.end(), n, b);
    }
    auto y = forward(embed_sequence(tokens, w, markers), w);
    return y[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)];
  }

  const NetworkWeights next = sequential_updated_weights(pair, w, eta, a);
  std::vector<Vector> markers;
  if (!b.empty()) markers.assign(n, b);
  auto y = forward(embed_sequence(pair.second, next, markers), next);
  return y[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)];
}

}  // namespace icb::attention
