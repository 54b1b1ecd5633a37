#include "icb/sphere/construction.hpp"

#include <algorithm>
#include <cmath>

#include "icb/attention/network.hpp"
#include "icb/common/errors.hpp"
#include "icb/common/numeric.hpp"
#include "icb/common/random.hpp"

namespace icb::sphere {

using attention::HyperParams;

int phi(int j, int head_dim) {
  return ((j - 1) / head_dim) * (head_dim - 1) + ((j - 1) % head_dim) + 1;
}

namespace {

struct Layout {
  int d = 0;
  int da = 0;
  int half = 0;
};

Layout layout(const Matrix& A, const HyperParams& hyper) {
  hyper.validate();
  if ((hyper.model_dim - hyper.heads) % 2 != 0)
    throw HypothesisError("construction: d_x - H must be even");
  Layout l;
  l.d = (hyper.model_dim - hyper.heads) / 2;
  l.da = hyper.head_dim;
  l.half = (l.da - 1) / 2;
  if (l.d < 1) throw HypothesisError("construction: need d = (d_x - H)/2 >= 1");
  if (static_cast<int>(A.cols()) != l.d)
    throw InputError("construction: A must have d = (d_x - H)/2 columns");
  for (std::size_t r = 0; r < A.rows(); ++r)
    if (std::abs(std::sqrt(compensated_dot(A.row(r), A.row(r))) - 1.0) > 1e-10)
      throw InputError("construction: rows of A must be unit length");
  return l;
}

enum class Slot { first, second, constant, none };

// Which case of the template / u definition coordinate alpha (one-based) falls in.
Slot classify(int alpha, const Layout& l, int* column) {
  const int offset = (alpha - 1) % l.da;
  if (offset == l.da - 1) return Slot::constant;
  if (offset < l.half) {
    const int c = phi(alpha, l.da);
    if (c <= l.d) {
      *column = c;
      return Slot::first;
    }
    return Slot::none;
  }
  const int c = phi(alpha - l.half, l.da);
  if (c <= l.d) {
    *column = c;
    return Slot::second;
  }
  return Slot::none;
}

// Template i (one-based, i in [2n + 1]).
Vector make_template(const Matrix& A, int i, int N, const Layout& l, int dx) {
  const int n = static_cast<int>(A.rows());
  Vector x(static_cast<std::size_t>(dx), 0.0);
  for (int alpha = 1; alpha <= dx; ++alpha) {
    int column = 0;
    double v = 0.0;
    switch (classify(alpha, l, &column)) {
      case Slot::constant: v = N; break;
      case Slot::first:
        if (i <= n) v = A(static_cast<std::size_t>(i - 1), static_cast<std::size_t>(column - 1));
        break;
      case Slot::second:
        if (i > n && i <= 2 * n)
          v = A(static_cast<std::size_t>(i - n - 1), static_cast<std::size_t>(column - 1));
        break;
      case Slot::none: break;
    }
    x[static_cast<std::size_t>(alpha - 1)] = v / N;
  }
  return x;
}

}  // namespace

Vector construction_u(const Matrix& A, int j1, int j2, const HyperParams& hyper) {
  const Layout l = layout(A, hyper);
  const int n = static_cast<int>(A.rows());
  if (j1 < 0 || j1 >= n || j2 < 0 || j2 >= n) throw InputError("construction_u: row index out of range");
  Vector u(static_cast<std::size_t>(hyper.model_dim), 0.0);
  for (int alpha = 1; alpha <= hyper.model_dim; ++alpha) {
    int column = 0;
    double v = 0.0;
    switch (classify(alpha, l, &column)) {
      case Slot::first: v = A(static_cast<std::size_t>(j1), static_cast<std::size_t>(column - 1)); break;
      case Slot::second: v = A(static_cast<std::size_t>(j2), static_cast<std::size_t>(column - 1)); break;
      case Slot::constant: v = 2.0 * hyper.sentence_len; break;
      case Slot::none: break;
    }
    u[static_cast<std::size_t>(alpha - 1)] = v;
  }
  return u;
}

Layer1Construction lower_bound_layer1_construction(const Matrix& A, const HyperParams& hyper,
                                                   std::uint64_t seed) {
  const Layout l = layout(A, hyper);
  Layer1Construction out;
  out.d = l.d;
  out.n = static_cast<int>(A.rows());
  out.half = l.half;
  const int N = hyper.sentence_len;
  const auto dx = static_cast<std::size_t>(hyper.model_dim);

  out.weights = attention::NetworkWeights::random(hyper, 0.5, 1.0, seed);
  for (double& v : out.weights.vocab.values()) v = 1.0;
  for (auto& head : out.weights.layers[0]) {
    for (double& v : head.key.values()) v = 0.0;
    for (double& v : head.query.values()) v = 0.0;
    head.key(0, static_cast<std::size_t>(l.da - 1)) = 1.0;
    head.query(0, static_cast<std::size_t>(l.da - 1)) = 1.0;
  }

  for (int i = 1; i <= 2 * out.n + 1; ++i)
    out.templates.push_back(make_template(A, i, N, l, hyper.model_dim));

  Matrix mix(dx, dx);  // sum_h O^h V^h
  for (const auto& head : out.weights.layers[0]) {
    const Matrix ov = mat_mul(head.output, head.value);
    for (std::size_t k = 0; k < mix.size(); ++k) mix.values()[k] += ov.values()[k];
  }

  const std::vector<int> tokens(2 * static_cast<std::size_t>(N), 0);
  for (int j1 = 0; j1 < out.n; ++j1)
    for (int j2 = 0; j2 < out.n; ++j2) {
      std::vector<Vector> markers(static_cast<std::size_t>(N), out.templates[static_cast<std::size_t>(j1)]);
      markers.insert(markers.end(), static_cast<std::size_t>(N),
                     out.templates[static_cast<std::size_t>(j2 + out.n)]);
      const auto inputs = attention::embed_sequence(tokens, out.weights, markers);
      const auto y = attention::layer_forward(inputs, 0, out.weights);
      const Vector expected = mat_vec(mix, construction_u(A, j1, j2, hyper));
      for (const auto& yi : y)
        for (std::size_t r = 0; r < dx; ++r)
          out.max_deviation = std::max(out.max_deviation, std::abs(yi[r] - expected[r]));
    }
  out.pass = out.max_deviation < 1e-12;
  return out;
}

}  // namespace icb::sphere
