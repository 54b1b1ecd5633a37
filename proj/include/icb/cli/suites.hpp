#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include <json.hpp>

#include "icb/cli/config.hpp"

namespace icb::cli {

struct RunOptions {
  std::filesystem::path out_dir = "out";
  std::optional<std::uint64_t> seed;  // overrides the config seed
  unsigned threads = 1;
};

struct RunResult {
  bool pass = true;
  std::vector<std::filesystem::path> outputs;
  nlohmann::json manifest;
};

// Each runner validates `config` against its schema, writes its outputs and
// a manifest.json under opts.out_dir, and reports whether every check passed.
RunResult run_gap_experiment(const nlohmann::json& config, const RunOptions& opts);
RunResult run_verify_bounds(const nlohmann::json& config, const RunOptions& opts);
RunResult run_verify_sphere(const nlohmann::json& config, const RunOptions& opts);
RunResult run_design(const nlohmann::json& config, const RunOptions& opts);

RunResult run_suite(Suite suite, const nlohmann::json& config, const RunOptions& opts);

}  // namespace icb::cli
