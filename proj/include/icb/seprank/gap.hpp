#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "icb/seprank/grid.hpp"

namespace icb::seprank {

struct GapConfig {
  std::vector<double> etas{1e-1, 1e-2, 1e-3, 1e-4};
  std::vector<int> depths{2};
  std::vector<int> widths{4};
  int heads = 2;
  int sentence_len = 2;
  int vocab = 8;
  // Larger weights make the eta = 0.1 step overshoot by orders of magnitude.
  double lambda_min = 0.3;
  double lambda_max = 0.6;
  int templates = 24;
  TemplateLaw law = TemplateLaw::unit_sphere;
  double tau_relative = 1e-8;  // tau = tau_relative * sigma_1 of each matrix
  int position = 0;
  int coordinate = 0;
  std::uint64_t seed = 0;
  GridOptions grid;
};

struct GapRow {
  attention::Mode mode = attention::Mode::in_context;
  int L = 0, d_x = 0, H = 0, N = 0;
  double eta = 0.0;
  int Z = 0;
  double tau = 0.0;  // absolute threshold used
  int spectral_rank = 0;
  int cert_rank = 0;  // certificate on the symmetric factor at eps = tau
  std::vector<double> top_singular;
  std::uint64_t seed = 0;
};

std::vector<GapRow> gap_experiment(const GapConfig& cfg);

void write_gap_csv(std::ostream& out, const std::vector<GapRow>& rows);

}  // namespace icb::seprank
