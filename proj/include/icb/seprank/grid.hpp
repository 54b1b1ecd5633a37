#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "icb/attention/network.hpp"

namespace icb::seprank {

enum class TemplateLaw { unit_sphere, unit_cube };

TemplateLaw parse_template_law(const std::string& name);
const char* template_law_name(TemplateLaw law);

struct GridSpec {
  int templates = 1;  // Z
  std::uint64_t seed = 0;
  TemplateLaw law = TemplateLaw::unit_sphere;
  std::vector<Vector> a_templates;
  std::vector<Vector> b_templates;

  // Sphere templates are normalized Gaussians; cube templates are uniform on [0,1]^dim.
  static GridSpec sample(int templates, int dim, std::uint64_t seed,
                         TemplateLaw law = TemplateLaw::unit_sphere);
  void validate(int dim) const;
};

struct MatricizationMatrix {
  Matrix entries;  // rows: a-templates, columns: b-templates
  attention::Mode mode = attention::Mode::in_context;
  std::uint64_t grid_seed = 0;
  attention::HyperParams hyper;
  double eta = 0.0;
  int position = 0;
  int coordinate = 0;
};

struct GridOptions {
  int max_templates = 512;
  unsigned threads = 1;
};

MatricizationMatrix build_grid_matrix(attention::Mode mode, const attention::SentencePair& pair,
                                      const attention::NetworkWeights& w, double eta,
                                      const GridSpec& grid, int i, int p,
                                      const GridOptions& opts = {});

}  // namespace icb::seprank
