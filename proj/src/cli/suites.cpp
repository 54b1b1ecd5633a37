#include "icb/cli/suites.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <deque>
#include <fstream>
#include <numeric>
#include <sstream>

#include "icb/combinatorics/lemmas.hpp"
#include "icb/combinatorics/multinomial.hpp"
#include "icb/common/random.hpp"
#include "icb/designer/embeddings.hpp"
#include "icb/designer/examples.hpp"
#include "icb/seprank/gap.hpp"
#include "icb/sphere/construction.hpp"
#include "icb/sphere/sphere.hpp"

namespace icb::cli {

using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr const char* kManifestSchema = "icb-manifest/1";
constexpr const char* kToolVersion = "0.1.0";

std::string decimal(double x) {
  if (std::isnan(x)) return "nan";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

std::string yes(bool b) { return b ? "true" : "false"; }

std::filesystem::path prepare(const RunOptions& opts) {
  std::filesystem::create_directories(opts.out_dir);
  return opts.out_dir;
}

void write_text(const std::filesystem::path& path, const std::string& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << body;
  if (!out) throw IoError("write failed for " + path.string());
}

std::uint64_t effective_seed(const json& cfg, const RunOptions& opts) {
  return opts.seed ? *opts.seed : cfg.at("seed").get<std::uint64_t>();
}

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void finish(RunResult& result, Suite suite, const json& cfg, const RunOptions& opts,
            const Stopwatch& clock, ordered_json extra = ordered_json::object()) {
  ordered_json m;
  m["schema"] = kManifestSchema;
  m["suite"] = suite_name(suite);
  m["config"] = cfg;
  if (opts.seed) m["seed_override"] = *opts.seed;
  m["threads"] = opts.threads;
  m["versions"] = {{"icb", kToolVersion}, {"compiler", __VERSION__}, {"cplusplus", __cplusplus}};
  m["wall_time_s"] = clock.seconds();
  ordered_json outs = ordered_json::array();
  for (const auto& p : result.outputs) outs.push_back(p.filename().string());
  m["outputs"] = outs;
  m["pass"] = result.pass;
  for (auto it = extra.begin(); it != extra.end(); ++it) m[it.key()] = it.value();
  const auto path = opts.out_dir / "manifest.json";
  write_text(path, m.dump(2) + "\n");
  result.manifest = json::parse(m.dump());
}

template <class T>
std::vector<T> list_of(const json& node) {
  return node.get<std::vector<T>>();
}

// ---- verify-bounds ----

struct LemmaTable {
  std::string id;
  std::ostringstream rows;
  bool pass = true;
  int count = 0;

  void add(const std::string& instance, const std::string& exact, double lower, double upper, bool ok) {
    rows << id << ',' << instance << ',' << exact << ',' << decimal(lower) << ',' << decimal(upper)
         << ',' << yes(ok) << '\n';
    pass = pass && ok;
    ++count;
  }
};

std::string tag(std::initializer_list<std::pair<const char*, std::string>> parts) {
  std::string s;
  for (const auto& [k, v] : parts) {
    if (!s.empty()) s += ';';
    s += k;
    s += '=';
    s += v;
  }
  return s;
}

std::string num(double x) { return json(x).dump(); }
std::string num(int x) { return std::to_string(x); }

}  // namespace

RunResult run_gap_experiment(const json& config, const RunOptions& opts) {
  const Stopwatch clock;
  const json cfg = resolve_config(Suite::gap_experiment, config);
  seprank::GapConfig g;
  g.etas = list_of<double>(cfg["etas"]);
  g.depths = list_of<int>(cfg["depths"]);
  g.widths = list_of<int>(cfg["widths"]);
  g.heads = cfg["heads"];
  g.sentence_len = cfg["sentence_len"];
  g.vocab = cfg["vocab"];
  g.lambda_min = cfg["lambda_min"];
  g.lambda_max = cfg["lambda_max"];
  g.templates = cfg["templates"];
  g.law = seprank::parse_template_law(cfg["template_law"].get<std::string>());
  g.tau_relative = cfg["tau_relative"];
  g.position = cfg["position"];
  g.coordinate = cfg["coordinate"];
  g.seed = effective_seed(cfg, opts);
  g.grid.max_templates = cfg["max_templates"];
  g.grid.threads = opts.threads;
  if (!(g.lambda_min <= g.lambda_max)) throw ConfigError("config.lambda_min: must not exceed lambda_max");

  const auto rows = seprank::gap_experiment(g);
  RunResult result;
  const auto dir = prepare(opts);
  std::ostringstream csv;
  seprank::write_gap_csv(csv, rows);
  write_text(dir / "gap.csv", csv.str());
  result.outputs.push_back(dir / "gap.csv");

  // Rows come in (in_context, sequential) pairs per eta.
  ordered_json violations = ordered_json::array();
  for (std::size_t i = 0; i + 1 < rows.size(); i += 2) {
    if (rows[i + 1].spectral_rank > rows[i].spectral_rank) {
      result.pass = false;
      violations.push_back({{"L", rows[i].L}, {"d_x", rows[i].d_x}, {"eta", rows[i].eta}});
    }
  }
  finish(result, Suite::gap_experiment, cfg, opts, clock,
         {{"rows", rows.size()}, {"sequential_above_in_context", violations}});
  return result;
}

RunResult run_verify_bounds(const json& config, const RunOptions& opts) {
  namespace cb = icb::combinatorics;
  const Stopwatch clock;
  const json cfg = resolve_config(Suite::verify_bounds, config);
  std::deque<LemmaTable> tables;
  auto table = [&](const char* id) -> LemmaTable& {
    tables.push_back(LemmaTable{});
    tables.back().id = id;
    return tables.back();
  };

  {
    const auto& c = cfg["multinomial_max"];
    auto& t = table("multinomial_max");
    for (int K : list_of<int>(c["K"]))
      for (int M : list_of<int>(c["M"])) {
        // Largest multinomial over all compositions against the balanced split.
        double best = -INFINITY;
        cb::for_each_composition(K, M, [&](std::span<const int> a) {
          best = std::max(best, cb::log_multinomial(K, a).log_magnitude());
        });
        const auto split = cb::multinomial_max_location(K, M);
        const double at = cb::log_multinomial(K, split).log_magnitude();
        const bool ok = std::abs(at - best) <= 1e-12 * std::max(1.0, std::abs(best));
        t.add(tag({{"K", num(K)}, {"M", num(M)}}), decimal(best), at, at, ok);
      }
  }
  {
    const auto& c = cfg["s_recurrence"];
    const double tol = c["tolerance"];
    auto& t = table("s_recurrence");
    for (int K : list_of<int>(c["K"]))
      for (int M : list_of<int>(c["M"]))
        for (double eta : list_of<double>(c["eta"])) {
          double worst = 0.0;
          for (int n = 0; n <= K; ++n) {
            const double direct = cb::s_direct(K, M, eta, n).log_magnitude();
            const double rec = cb::s_recurrence(K, M, eta, n).log_magnitude();
            worst = std::max(worst, std::abs(std::expm1(rec - direct)));
          }
          t.add(tag({{"K", num(K)}, {"M", num(M)}, {"eta", num(eta)}}), decimal(worst), 0.0, tol,
                worst <= tol);
        }
  }
  {
    const auto& c = cfg["argmax_s"];
    auto& t = table("argmax_s");
    for (int K : list_of<int>(c["K"]))
      for (int M : list_of<int>(c["M"]))
        for (double eta : list_of<double>(c["eta"])) {
          const int formula = cb::argmax_s(K, M, eta);
          const auto all = cb::argmax_s_exhaustive(K, M, eta);
          const bool ok = std::find(all.begin(), all.end(), formula) != all.end();
          t.add(tag({{"K", num(K)}, {"M", num(M)}, {"eta", num(eta)}}), std::to_string(formula),
                all.front(), all.back(), ok);
        }
  }
  {
    const auto& c = cfg["lattice_ball"];
    const double lo = c["lower_slack"], hi = c["upper_slack"];
    auto& t = table("lattice_ball");
    for (int d : list_of<int>(c["d"]))
      for (int R : list_of<int>(c["R"])) {
        const auto n = cb::lattice_ball_count(d, R);
        const double lower = lo * n.lower, upper = hi * n.upper;
        const auto x = static_cast<double>(n.exact);
        t.add(tag({{"d", num(d)}, {"R", num(R)}}), std::to_string(n.exact), lower, upper,
              x >= lower && x <= upper);
      }
  }
  {
    const auto& c = cfg["characterize_T"];
    auto& t = table("characterize_T");
    for (int K : list_of<int>(c["K"]))
      for (int M : list_of<int>(c["M"]))
        for (double s : list_of<double>(c["s"])) {
          const auto r = cb::characterize_T(K, M, s);
          t.add(tag({{"K", num(K)}, {"M", num(M)}, {"s", num(s)}}), std::to_string(r.exact.size()),
                static_cast<double>(r.inner.size()), static_cast<double>(r.outer.size()),
                r.inner_in_exact && r.exact_in_outer);
        }
  }
  {
    const auto& c = cfg["count_binom_eta"];
    const double slack = c["slack"];
    auto& t = table("count_binom_eta");
    for (int K : list_of<int>(c["K"]))
      for (double eta : list_of<double>(c["eta"]))
        for (double s : list_of<double>(c["s"])) {
          const auto r = cb::count_nonneg_binom_eta(K, eta, s);
          const double upper = r.bound_defined ? slack * r.upper : std::nan("");
          const bool ok = !r.bound_defined || r.exact <= upper;
          t.add(tag({{"K", num(K)}, {"eta", num(eta)}, {"s", num(s)}}), std::to_string(r.exact), 0.0,
                upper, ok);
        }
  }
  {
    const auto& c = cfg["count_summands"];
    const double slack = c["slack"];
    auto& up = table("count_summands_upper");
    auto& low = table("count_summands_lower");
    for (int K : list_of<int>(c["K"]))
      for (int M : list_of<int>(c["M"]))
        for (double eta : list_of<double>(c["eta"]))
          for (double s : list_of<double>(c["s"])) {
            const auto r = cb::count_nonneg_summands(K, M, eta, s, opts.threads);
            const auto x = static_cast<double>(r.exact);
            const std::string inst = tag({{"K", num(K)}, {"M", num(M)}, {"eta", num(eta)}, {"s", num(s)}});
            up.add(inst + ";hypothesis=" + yes(r.upper_hypothesis), std::to_string(r.exact),
                           0.0, slack * r.upper, !r.upper_hypothesis || x <= slack * r.upper);
            low.add(inst + ";hypothesis=" + yes(r.lower_hypothesis), std::to_string(r.exact),
                           r.lower / slack, INFINITY, !r.lower_hypothesis || x >= r.lower / slack);
          }
  }
  {
    const auto& c = cfg["theorem_b1"];
    auto& t = table("theorem_b1");
    for (int L : list_of<int>(c["L"]))
      for (int dx : list_of<int>(c["d_x"]))
        for (double eta : list_of<double>(c["eta"])) {
          cb::BoundInstance inst;
          inst.L = L;
          inst.d_x = dx;
          inst.N = c["N"];
          inst.H = c["H"];
          inst.eta = eta;
          inst.lambda_min = c["lambda_min"];
          inst.lambda_max = c["lambda_max"];
          inst.epsilon = c["epsilon"];
          inst.M_bound = c["M_bound"];
          const auto r = cb::theorem_b1_bound(inst);
          const double lb = r.bound.log_magnitude();
          // The row records the log of the bound. Outside the hypotheses the
          // value is reported but not judged, as for the summand counts.
          t.add(tag({{"L", num(L)}, {"d_x", num(dx)}, {"eta", num(eta)}}) + ";hypothesis=" +
                    yes(r.hypotheses_ok),
                decimal(lb), lb, lb, !r.hypotheses_ok || std::isfinite(lb));
        }
  }

  RunResult result;
  const auto dir = prepare(opts);
  ordered_json coverage = ordered_json::array();
  ordered_json counts = ordered_json::object();
  for (auto& t : tables) {
    const auto path = dir / ("bounds_" + t.id + ".csv");
    write_text(path, "lemma_id,instance,exact_value,bound_lower,bound_upper,pass\n" + t.rows.str());
    result.outputs.push_back(path);
    result.pass = result.pass && t.pass;
    if (t.count > 0) coverage.push_back(t.id);
    counts[t.id] = t.count;
  }
  finish(result, Suite::verify_bounds, cfg, opts, clock, {{"coverage", coverage}, {"row_counts", counts}});
  return result;
}

RunResult run_verify_sphere(const json& config, const RunOptions& opts) {
  namespace sp = icb::sphere;
  const Stopwatch clock;
  const json cfg = resolve_config(Suite::verify_sphere, config);
  const std::uint64_t seed = effective_seed(cfg, opts);
  std::ostringstream csv;
  csv << "check_id,d,lambda,n,trials,estimate,stderr,bound,pass\n";
  bool pass = true;
  auto row = [&](const char* id, int d, int lambda, int n, long long trials, double est, double se,
                 double bound, bool ok) {
    csv << id << ',' << d << ',' << lambda << ',' << n << ',' << trials << ',' << decimal(est) << ','
        << decimal(se) << ',' << decimal(bound) << ',' << yes(ok) << '\n';
    pass = pass && ok;
  };

  {
    const auto& c = cfg["cosine_lambda1"];
    const long long samples = c["samples"];
    const std::uint64_t s = derive_seed(seed, 0);
    for (int d : list_of<int>(c["d"])) {
      const auto e = sp::mc_cosine_power_expectation(d, 1, samples, derive_seed(s, d), opts.threads);
      const double target = 1.0 / (d + 1);
      row("cosine_lambda1", d, 1, 0, samples, e.estimate, e.std_error, target,
          std::abs(e.estimate - target) < 3.0 * e.std_error);
    }
  }
  {
    const auto& c = cfg["cosine_power_bound"];
    const long long samples = c["samples"];
    const int lmax = c["lambda_max"];
    const std::uint64_t s = derive_seed(seed, 1);
    for (int d : list_of<int>(c["d"]))
      for (int lambda = d; lambda <= lmax; ++lambda) {
        const auto e = sp::mc_cosine_power_expectation(
            d, lambda, samples, derive_seed(derive_seed(s, d), lambda), opts.threads);
        const double bound = sp::cosine_power_bound(d, lambda);
        row("cosine_power_bound", d, lambda, 0, samples, e.estimate, e.std_error, bound,
            e.estimate <= bound);
      }
  }
  {
    const auto& c = cfg["integrand_bound"];
    const int lmax = c["lambda_max"];
    const int grid = c["grid_points"];
    for (int d : list_of<int>(c["d"]))
      for (int lambda = d; lambda <= lmax; ++lambda) {
        const auto r = sp::integrand_bound_check(d, lambda, grid);
        row("integrand_bound", d, lambda, 0, grid, r.max_ratio, 0.0, 1.0, r.pass);
      }
  }
  {
    const auto& c = cfg["frobenius_bound"];
    const int d = c["d"], lambda = c["lambda"], trials = c["trials"];
    const std::uint64_t s = derive_seed(seed, 3);
    for (int n : list_of<int>(c["n"])) {
      const auto r = sp::frobenius_expectation_check(d, lambda, n, trials, derive_seed(s, n), opts.threads);
      row("frobenius_bound", d, lambda, n, trials, r.mc_mean, r.std_error, r.bound, r.pass);
    }
  }
  {
    const auto& c = cfg["spectral_count"];
    const int d = c["d"], lambda = c["lambda"], n = c["n"], count = c["matrices"];
    const std::uint64_t s = derive_seed(seed, 4);
    for (int i = 0; i < count; ++i) {
      const auto pts = sp::sample_sphere(d, n, derive_seed(s, i), opts.threads);
      const auto r = sp::spectral_count_check(sp::hadamard_power_gram(pts, lambda));
      row("spectral_count", d, lambda, n, 1, r.r, 0.0, r.floor, r.holds);
    }
  }
  {
    const auto& c = cfg["layer1_construction"];
    const int n = c["n"], dx = c["d_x"], H = c["H"], N = c["N"];
    if (dx <= H || (dx - H) % 2 != 0 || dx % H != 0)
      throw ConfigError("config.layer1_construction.d_x: need d_x > H, H | d_x and d_x - H even");
    const int d = (dx - H) / 2;
    const auto pts = sp::sample_sphere(d - 1, n, derive_seed(seed, 5));
    Matrix A(static_cast<std::size_t>(n), static_cast<std::size_t>(d));
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < d; ++j)
        A(static_cast<std::size_t>(i), static_cast<std::size_t>(j)) =
            pts.points[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
    const auto hyper = attention::make_hyper(1, H, dx, N, 2 * n + 1);
    const auto r = sp::lower_bound_layer1_construction(A, hyper, derive_seed(seed, 6));
    row("layer1_construction", d, 0, n, static_cast<long long>(n) * n, r.max_deviation, 0.0, 1e-12,
        r.pass);
  }

  RunResult result;
  result.pass = pass;
  const auto dir = prepare(opts);
  write_text(dir / "sphere.csv", csv.str());
  result.outputs.push_back(dir / "sphere.csv");
  finish(result, Suite::verify_sphere, cfg, opts, clock, {{"effective_seed", seed}});
  return result;
}

RunResult run_design(const json& config, const RunOptions& opts) {
  namespace ds = icb::designer;
  const Stopwatch clock;
  const json cfg = resolve_config(Suite::design_examples, config);
  const std::string tasks_path = cfg["tasks"];
  if (tasks_path.empty()) throw ConfigError("config.tasks: a task embedding file is required");
  const auto load = [](const std::string& p, ds::SentenceSource src) {
    return ds::ingest_embeddings(p, ds::format_from_path(p), src);
  };
  const auto tasks = load(tasks_path, ds::SentenceSource::task);
  const std::string corpus_path = cfg["corpus"];
  const auto corpus = corpus_path.empty() ? tasks : load(corpus_path, ds::SentenceSource::corpus);

  ds::DesignParams p;
  p.knn.k = cfg["k"];
  p.knn.threshold = cfg["threshold"];
  p.knn.threads = opts.threads;
  p.knn.shard_size = cfg["shard_size"];
  p.budget = cfg["max_tokens"].get<std::size_t>();
  p.sep_token = cfg["sep_token"];
  p.seed = effective_seed(cfg, opts);
  p.dedup_pool = cfg["dedup_pool"];
  p.approximate = cfg["approximate"];
  p.nsw.seed = derive_seed(p.seed, 1);
  const auto variant = ds::parse_variant(cfg["variant"].get<std::string>());
  const auto build = ds::build_dataset(variant, tasks, corpus, p);

  RunResult result;
  const auto dir = prepare(opts);
  ds::export_dataset(build.examples, dir / "dataset.jsonl");
  result.outputs.push_back(dir / "dataset.jsonl");
  for (const auto& e : build.examples)
    if (e.total_tokens() > p.budget) result.pass = false;

  ordered_json extra;
  extra["examples"] = build.examples.size();
  extra["skipped_anchors"] = build.skipped_anchors;
  extra["standalone"] = build.standalone;
  extra["recall"] = build.recall;

  const std::string regular_path = cfg["regular"];
  const std::size_t batch_size = cfg["batch_size"].get<std::size_t>();
  if (!regular_path.empty() && batch_size > 0) {
    const auto regular_sentences = load(regular_path, ds::SentenceSource::corpus);
    ds::DesignParams plain = p;
    plain.knn.k = 0;
    auto regular = ds::build_dataset(ds::ArrangementVariant::plain, regular_sentences, {}, plain).examples;
    for (auto& e : regular) e.example_id = "regular-" + e.example_id;
    const auto mixed = ds::mix_batches(regular, build.examples, batch_size, derive_seed(p.seed, 2));
    std::ostringstream lines;
    for (std::size_t b = 0; b < mixed.batches.size(); ++b) {
      ordered_json line;
      line["batch"] = b;
      ordered_json ids = ordered_json::array();
      for (const auto& e : mixed.batches[b]) ids.push_back(e.example_id);
      line["example_ids"] = ids;
      lines << line.dump() << '\n';
    }
    write_text(dir / "batches.jsonl", lines.str());
    result.outputs.push_back(dir / "batches.jsonl");
    extra["batches"] = mixed.batches.size();
    extra["regular_remainder"] = mixed.regular_remainder;
    extra["designed_remainder"] = mixed.designed_remainder;
  }
  finish(result, Suite::design_examples, cfg, opts, clock, extra);
  return result;
}

RunResult run_suite(Suite suite, const json& config, const RunOptions& opts) {
  switch (suite) {
    case Suite::gap_experiment: return run_gap_experiment(config, opts);
    case Suite::verify_bounds: return run_verify_bounds(config, opts);
    case Suite::verify_sphere: return run_verify_sphere(config, opts);
    case Suite::design_examples: return run_design(config, opts);
  }
  throw ConfigError("unknown suite");
}

}  // namespace icb::cli
