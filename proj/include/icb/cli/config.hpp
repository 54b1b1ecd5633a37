#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "icb/common/errors.hpp"

namespace icb::cli {

class ConfigError : public InputError {
 public:
  using InputError::InputError;
};

enum class Suite { gap_experiment, verify_bounds, verify_sphere, design_examples };

const char* suite_name(Suite s);
Suite parse_suite(const std::string& name);

// Schema nodes: {"type": integer|number|boolean|string|array|object, "default": ...,
// "min"/"max" (numbers, array items), "items" (array element type),
// "enum" (strings), "fields" (object members)}.
const nlohmann::json& schema(Suite s);

// Fills defaults from the schema and checks types, ranges and key names.
// Errors name the offending field, e.g. "config.etas[2]: must be <= 1".
nlohmann::json resolve_config(Suite s, const nlohmann::json& user);

nlohmann::json load_config_file(const std::filesystem::path& path);

}  // namespace icb::cli
