#include "icb/seprank/gap.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "icb/common/errors.hpp"
#include "icb/common/random.hpp"
#include "icb/seprank/spectrum.hpp"

namespace icb::seprank {

using attention::Mode;

namespace {

std::string decimal(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

GapRow summarize(const MatricizationMatrix& m, const GapConfig& cfg, double eta) {
  GapRow row;
  row.mode = m.mode;
  row.L = m.hyper.layers;
  row.d_x = m.hyper.model_dim;
  row.H = m.hyper.heads;
  row.N = m.hyper.sentence_len;
  row.eta = eta;
  row.Z = static_cast<int>(m.entries.rows());
  row.seed = cfg.seed;
  const Vector sigma = singular_values(m.entries);
  row.top_singular.assign(sigma.begin(), sigma.begin() + std::min<std::size_t>(8, sigma.size()));
  const double top = sigma.empty() ? 0.0 : sigma.front();
  if (top == 0.0) {
    row.tau = 0.0;  // all-zero matrix: nothing above any threshold
    return row;
  }
  row.tau = cfg.tau_relative * top;
  row.spectral_rank = static_cast<int>(
      std::count_if(sigma.begin(), sigma.end(), [&](double s) { return s > row.tau; }));
  row.cert_rank = eps_rank_certificate(symmetric_factor(m.entries), row.tau);
  return row;
}

}  // namespace

std::vector<GapRow> gap_experiment(const GapConfig& cfg) {
  if (cfg.etas.empty() || cfg.depths.empty() || cfg.widths.empty()) return {};
  if (!(cfg.tau_relative > 0.0)) throw InputError("gap: tau_relative must be > 0");
  for (double eta : cfg.etas)
    if (!(eta >= 0.0 && eta <= 1.0)) throw InputError("gap: eta must lie in [0, 1]");

  std::vector<GapRow> rows;
  for (int L : cfg.depths)
    for (int dx : cfg.widths) {
      if (cfg.heads < 1 || dx % cfg.heads != 0)
        throw InputError("gap: heads must divide every width");
      const auto hyper = attention::make_hyper(L, cfg.heads, dx, cfg.sentence_len, cfg.vocab);
      const std::uint64_t config_seed =
          derive_seed(derive_seed(cfg.seed, static_cast<std::uint64_t>(L)),
                      static_cast<std::uint64_t>(dx));
      const auto w = attention::NetworkWeights::random(hyper, cfg.lambda_min, cfg.lambda_max,
                                                       derive_seed(config_seed, 0));
      attention::SentencePair pair;
      Rng token_rng(derive_seed(config_seed, 1));
      for (int t = 0; t < cfg.sentence_len; ++t)
        pair.first.push_back(static_cast<int>(token_rng.below(static_cast<std::size_t>(cfg.vocab))));
      for (int t = 0; t < cfg.sentence_len; ++t)
        pair.second.push_back(static_cast<int>(token_rng.below(static_cast<std::size_t>(cfg.vocab))));
      const GridSpec grid = GridSpec::sample(cfg.templates, dx, derive_seed(config_seed, 2), cfg.law);

      // The in-context matrix does not depend on eta.
      const auto in_context = build_grid_matrix(Mode::in_context, pair, w, 0.0, grid,
                                                cfg.position, cfg.coordinate, cfg.grid);
      for (double eta : cfg.etas) {
        rows.push_back(summarize(in_context, cfg, eta));
        const auto seq = build_grid_matrix(Mode::sequential, pair, w, eta, grid, cfg.position,
                                           cfg.coordinate, cfg.grid);
        rows.push_back(summarize(seq, cfg, eta));
      }
    }
  return rows;
}

void write_gap_csv(std::ostream& out, const std::vector<GapRow>& rows) {
  out << "mode,L,d_x,H,N,eta,Z,tau,spectral_rank,cert_rank,top8_singular_values,seed\n";
  for (const auto& r : rows) {
    std::string top;
    for (std::size_t k = 0; k < r.top_singular.size(); ++k) {
      if (k) top += ';';
      top += decimal(r.top_singular[k]);
    }
    out << attention::mode_name(r.mode) << ',' << r.L << ',' << r.d_x << ',' << r.H << ','
        << r.N << ',' << decimal(r.eta) << ',' << r.Z << ',' << decimal(r.tau) << ','
        << r.spectral_rank << ',' << r.cert_rank << ',' << top << ',' << r.seed << '\n';
  }
}

}  // namespace icb::seprank
