#include "icb/seprank/grid.hpp"

#include <cmath>
#include <string>

#include "icb/common/errors.hpp"
#include "icb/common/numeric.hpp"
#include "icb/common/parallel.hpp"
#include "icb/common/random.hpp"

namespace icb::seprank {

using attention::Mode;

TemplateLaw parse_template_law(const std::string& name) {
  if (name == "unit_sphere") return TemplateLaw::unit_sphere;
  if (name == "unit_cube") return TemplateLaw::unit_cube;
  throw InputError("unknown template law '" + name + "'");
}

const char* template_law_name(TemplateLaw law) {
  return law == TemplateLaw::unit_sphere ? "unit_sphere" : "unit_cube";
}

namespace {

std::vector<Vector> draw(int count, int dim, std::uint64_t seed, TemplateLaw law) {
  Rng rng(seed);
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count));
  for (int i = 0; i < count; ++i) {
    Vector x(static_cast<std::size_t>(dim));
    if (law == TemplateLaw::unit_cube) {
      for (double& v : x) v = rng.uniform();
    } else {
      double norm = 0.0;
      while (norm == 0.0) {
        for (double& v : x) v = rng.normal();
        norm = std::sqrt(compensated_dot(x, x));
      }
      for (double& v : x) v /= norm;
    }
    out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

GridSpec GridSpec::sample(int templates, int dim, std::uint64_t seed, TemplateLaw law) {
  if (templates < 1) throw InputError("grid: Z must be >= 1");
  if (dim < 1) throw InputError("grid: template dimension must be >= 1");
  GridSpec g;
  g.templates = templates;
  g.seed = seed;
  g.law = law;
  g.a_templates = draw(templates, dim, derive_seed(seed, 0), law);
  g.b_templates = draw(templates, dim, derive_seed(seed, 1), law);
  return g;
}

void GridSpec::validate(int dim) const {
  if (templates < 1) throw InputError("grid: Z must be >= 1");
  if (static_cast<int>(a_templates.size()) != templates ||
      static_cast<int>(b_templates.size()) != templates)
    throw InputError("grid: template count does not match Z");
  for (const auto* set : {&a_templates, &b_templates})
    for (const auto& t : *set) {
      if (static_cast<int>(t.size()) != dim) throw InputError("grid: template width must equal d_x");
      for (double v : t)
        if (!std::isfinite(v)) throw InputError("grid: non-finite template entry");
    }
}

MatricizationMatrix build_grid_matrix(Mode mode, const attention::SentencePair& pair,
                                      const attention::NetworkWeights& w, double eta,
                                      const GridSpec& grid, int i, int p,
                                      const GridOptions& opts) {
  if (grid.templates > opts.max_templates)
    throw BudgetError("grid: Z=" + std::to_string(grid.templates) + " needs " +
                      std::to_string(static_cast<long long>(grid.templates) * grid.templates) +
                      " evaluations; the guard allows Z <= " + std::to_string(opts.max_templates));
  grid.validate(w.hyper.model_dim);
  attention::validate_pair(pair, w.hyper);
  const int positions = static_cast<int>(pair.first.size()) * (mode == Mode::in_context ? 2 : 1);
  if (i < 0 || i >= positions) throw InputError("grid: output position out of range");
  if (p < 0 || p >= w.hyper.model_dim) throw InputError("grid: output coordinate out of range");

  MatricizationMatrix out;
  out.mode = mode;
  out.grid_seed = grid.seed;
  out.hyper = w.hyper;
  out.eta = eta;
  out.position = i;
  out.coordinate = p;
  const auto z = static_cast<std::size_t>(grid.templates);
  out.entries = Matrix(z, z);

  // Each row is an independent task writing only its own slots.
  parallel_for(z, opts.threads, [&](std::size_t r) {
    const Vector& a = grid.a_templates[r];
    if (mode == Mode::in_context) {
      for (std::size_t c = 0; c < z; ++c)
        out.entries(r, c) =
            attention::associated_eval(mode, pair, w, eta, {a, grid.b_templates[c]}, i, p);
      return;
    }
    const auto updated = attention::sequential_updated_weights(pair, w, eta, a);
    for (std::size_t c = 0; c < z; ++c) {
      // Already stepped with the a-marked gradient; only the b-marked forward remains.
      const auto& b = grid.b_templates[c];
      std::vector<Vector> markers(pair.second.size(), b);
      auto y = attention::forward(attention::embed_sequence(pair.second, updated, markers),
                                  updated);
      out.entries(r, c) = y[static_cast<std::size_t>(i)][static_cast<std::size_t>(p)];
    }
  });
  return out;
}

}  // namespace icb::seprank
