#include <cstdio>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "icb/cli/suites.hpp"
#include "icb/common/parallel.hpp"

int main(int argc, char** argv) {
  using namespace icb::cli;
  CLI::App app{"icb: attention separation-rank and example-design toolkit"};
  app.require_subcommand(1);
  app.fallthrough();

  std::string config_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  unsigned threads = 1;
  auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
  app.add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
  app.add_option("--out", out_dir, "Output directory");
  app.add_option("--threads", threads, "Worker thread cap")->check(CLI::Range(1u, 1024u));

  const std::pair<Suite, const char*> suites[] = {
      {Suite::gap_experiment, "Grid-tensor ranks, in-context vs sequential"},
      {Suite::verify_bounds, "Counting lemmas against exact enumeration"},
      {Suite::verify_sphere, "Sphere moments, Gram bounds and the layer-1 construction"},
      {Suite::design_examples, "Build training examples from sentence embeddings"},
  };
  for (const auto& [s, help] : suites) app.add_subcommand(suite_name(s), help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    // Help and version requests report success; usage errors share the config exit code.
    app.exit(e);
    return e.get_exit_code() == 0 ? 0 : 2;
  }

  try {
    const Suite suite = parse_suite(app.get_subcommands().front()->get_name());
    const nlohmann::json config =
        config_path.empty() ? nlohmann::json::object() : load_config_file(config_path);
    RunOptions opts;
    opts.out_dir = out_dir;
    if (*seed_opt) opts.seed = seed;
    opts.threads = threads;
    const RunResult r = run_suite(suite, config, opts);
    for (const auto& p : r.outputs) std::cout << p.string() << '\n';
    std::cout << suite_name(suite) << ": " << (r.pass ? "PASS" : "FAIL") << '\n';
    return r.pass ? 0 : 1;
  } catch (const icb::InputError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  }
}
