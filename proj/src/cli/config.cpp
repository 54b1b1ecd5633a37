#include "icb/cli/config.hpp"

#include <cmath>
#include <fstream>

namespace icb::cli {

using nlohmann::json;

const char* suite_name(Suite s) {
  switch (s) {
    case Suite::gap_experiment: return "gap-experiment";
    case Suite::verify_bounds: return "verify-bounds";
    case Suite::verify_sphere: return "verify-sphere";
    case Suite::design_examples: return "design-examples";
  }
  return "?";
}

Suite parse_suite(const std::string& name) {
  for (Suite s : {Suite::gap_experiment, Suite::verify_bounds, Suite::verify_sphere,
                  Suite::design_examples})
    if (name == suite_name(s)) return s;
  throw ConfigError("unknown suite '" + name + "'");
}

namespace {

json integer(long long def, std::optional<double> min = {}, std::optional<double> max = {}) {
  json n = {{"type", "integer"}, {"default", def}};
  if (min) n["min"] = *min;
  if (max) n["max"] = *max;
  return n;
}

json number(double def, std::optional<double> min = {}, std::optional<double> max = {}) {
  json n = {{"type", "number"}, {"default", def}};
  if (min) n["min"] = *min;
  if (max) n["max"] = *max;
  return n;
}

json list(const char* items, json def, std::optional<double> min = {}, std::optional<double> max = {}) {
  json n = {{"type", "array"}, {"items", items}, {"default", std::move(def)}};
  if (min) n["min"] = *min;
  if (max) n["max"] = *max;
  return n;
}

json text(const std::string& def) { return {{"type", "string"}, {"default", def}}; }
json flag(bool def) { return {{"type", "boolean"}, {"default", def}}; }
json choice(const std::string& def, std::vector<std::string> options) {
  return {{"type", "string"}, {"default", def}, {"enum", std::move(options)}};
}
json object(json fields) { return {{"type", "object"}, {"fields", std::move(fields)}}; }

json gap_schema() {
  return object({
      {"seed", integer(20240601, 0)},
      {"etas", list("number", {1e-1, 1e-2, 1e-3, 1e-4}, 0.0, 1.0)},
      {"depths", list("integer", {2}, 1, 4)},
      {"widths", list("integer", {4}, 1, 64)},
      {"heads", integer(2, 1)},
      {"sentence_len", integer(2, 2)},
      {"vocab", integer(8, 2)},
      {"lambda_min", number(0.3, 0.0)},
      {"lambda_max", number(0.6, 0.0)},
      {"templates", integer(24, 1)},
      {"max_templates", integer(512, 1)},
      {"template_law", choice("unit_sphere", {"unit_sphere", "unit_cube"})},
      {"tau_relative", number(1e-8, 0.0)},
      {"position", integer(0, 0)},
      {"coordinate", integer(0, 0)},
  });
}

json bounds_schema() {
  const json ks = json::array({4, 6, 9, 12, 16});
  return object({
      {"multinomial_max", object({{"K", list("integer", {4, 5, 9, 12}, 1, 40)},
                                  {"M", list("integer", {2, 3}, 1, 8)}})},
      {"s_recurrence", object({{"K", list("integer", ks, 1, 200)},
                               {"M", list("integer", {2, 3}, 1, 16)},
                               {"eta", list("number", {0.1, 0.5, 1.0}, 0.0, 1.0)},
                               {"tolerance", number(1e-12, 0.0)}})},
      {"argmax_s", object({{"K", list("integer", ks, 1, 200)},
                           {"M", list("integer", {2, 3}, 1, 16)},
                           {"eta", list("number", {0.1, 0.5, 1.0}, 0.0, 1.0)}})},
      {"lattice_ball", object({{"d", list("integer", {2, 3, 4}, 1, 6)},
                               {"R", list("integer", {2, 4, 6}, 0, 10)},
                               {"lower_slack", number(0.5, 0.0)},
                               {"upper_slack", number(2.0, 0.0)}})},
      {"characterize_T", object({{"K", list("integer", {9, 12, 16}, 1, 200)},
                                 {"M", list("integer", {2, 3}, 1, 16)},
                                 {"s", list("number", {0.05, 0.2, 0.5}, 0.0, 1.0)}})},
      {"count_binom_eta", object({{"K", list("integer", {10, 20, 30}, 1, 10000)},
                                  {"eta", list("number", {0.1, 0.5, 1.0}, 0.0, 1.0)},
                                  {"s", list("number", {0.05, 0.1, 0.2}, 0.0, 1.0)},
                                  {"slack", number(2.0, 0.0)}})},
      {"count_summands", object({{"K", list("integer", {9, 12, 15}, 1, 60)},
                                 {"M", list("integer", {2, 3}, 2, 8)},
                                 {"eta", list("number", {0.25, 0.5, 1.0}, 0.0, 1.0)},
                                 {"s", list("number", {0.05, 0.2}, 0.0, 0.2231301601484298)},
                                 {"slack", number(4.0, 0.0)}})},
      {"theorem_b1", object({{"L", list("integer", {4, 5}, 1, 40)},
                             {"d_x", list("integer", {3, 4, 6, 8}, 2, 4096)},
                             {"N", integer(2, 1)},
                             {"H", integer(1, 1)},
                             {"eta", list("number", {0.5, 1e-4}, 0.0, 1.0)},
                             {"lambda_min", number(1.0, 0.0)},
                             {"lambda_max", number(1.0, 0.0)},
                             {"epsilon", number(1.0, 0.0)},
                             {"M_bound", number(1.0, 0.0)}})},
  });
}

json sphere_schema() {
  return object({
      {"seed", integer(7, 0)},
      {"cosine_lambda1", object({{"d", list("integer", {1, 2, 3, 4, 5, 6, 7, 8}, 1, 64)},
                                 {"samples", integer(1000000, 2)}})},
      {"cosine_power_bound", object({{"d", list("integer", {2, 3}, 1, 64)},
                                     {"lambda_max", integer(10, 1)},
                                     {"samples", integer(200000, 2)}})},
      {"integrand_bound", object({{"d", list("integer", {2, 3}, 1, 64)},
                                  {"lambda_max", integer(10, 1)},
                                  {"grid_points", integer(10000, 2)}})},
      {"frobenius_bound", object({{"d", integer(2, 1)},
                                  {"lambda", integer(2, 1)},
                                  {"n", list("integer", {3, 8}, 1, 4096)},
                                  {"trials", integer(200, 2)}})},
      {"spectral_count", object({{"d", integer(4, 1)},
                                 {"lambda", integer(9, 1)},
                                 {"n", integer(30, 1)},
                                 {"matrices", integer(100, 0)}})},
      {"layer1_construction", object({{"n", integer(4, 1)},
                                      {"d_x", integer(8, 2)},
                                      {"H", integer(2, 1)},
                                      {"N", integer(3, 2)}})},
  });
}

json design_schema() {
  return object({
      {"tasks", text("")},
      {"corpus", text("")},
      {"regular", text("")},
      {"variant", choice("neighbors_in_context", {"neighbors_in_context", "random_in_context",
                                                  "neighbors_in_batch", "random_in_batch", "plain"})},
      {"k", integer(10, 0)},
      {"threshold", number(0.8, -1.0, 1.0)},
      {"max_tokens", integer(256, 1)},
      {"sep_token", integer(0, 0)},
      {"seed", integer(0, 0)},
      {"batch_size", integer(0, 0)},
      {"dedup_pool", flag(false)},
      {"approximate", flag(false)},
      {"shard_size", integer(1024, 1)},
  });
}

bool type_matches(const std::string& type, const json& v) {
  if (type == "integer") return v.is_number_integer();
  if (type == "number") return v.is_number();
  if (type == "boolean") return v.is_boolean();
  if (type == "string") return v.is_string();
  if (type == "array") return v.is_array();
  if (type == "object") return v.is_object();
  return false;
}

std::string show(double x) {
  json j = x;
  return j.dump();
}

void check_range(const json& node, const json& v, const std::string& path) {
  if (!v.is_number()) return;
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw ConfigError(path + ": must be finite");
  if (node.contains("min") && x < node["min"].get<double>())
    throw ConfigError(path + ": must be >= " + show(node["min"].get<double>()));
  if (node.contains("max") && x > node["max"].get<double>())
    throw ConfigError(path + ": must be <= " + show(node["max"].get<double>()));
}

json resolve(const json& node, const json* user, const std::string& path) {
  const std::string type = node["type"];
  if (type == "object") {
    if (user && !user->is_object()) throw ConfigError(path + ": expected an object");
    if (user)
      for (auto it = user->begin(); it != user->end(); ++it)
        if (!node["fields"].contains(it.key())) throw ConfigError(path + "." + it.key() + ": unknown key");
    json out = json::object();
    for (auto it = node["fields"].begin(); it != node["fields"].end(); ++it) {
      const json* child = (user && user->contains(it.key())) ? &(*user)[it.key()] : nullptr;
      out[it.key()] = resolve(it.value(), child, path + "." + it.key());
    }
    return out;
  }
  if (!user) return node["default"];
  if (!type_matches(type, *user)) throw ConfigError(path + ": expected " + type);
  if (type == "array") {
    const std::string items = node["items"];
    for (std::size_t i = 0; i < user->size(); ++i) {
      const std::string at = path + "[" + std::to_string(i) + "]";
      if (!type_matches(items, (*user)[i])) throw ConfigError(at + ": expected " + items);
      check_range(node, (*user)[i], at);
    }
    return *user;
  }
  check_range(node, *user, path);
  if (node.contains("enum")) {
    bool ok = false;
    for (const auto& option : node["enum"]) ok = ok || option == *user;
    if (!ok) throw ConfigError(path + ": must be one of " + node["enum"].dump());
  }
  return *user;
}

}  // namespace

const json& schema(Suite s) {
  static const json gap = gap_schema();
  static const json bounds = bounds_schema();
  static const json sphere = sphere_schema();
  static const json design = design_schema();
  switch (s) {
    case Suite::gap_experiment: return gap;
    case Suite::verify_bounds: return bounds;
    case Suite::verify_sphere: return sphere;
    case Suite::design_examples: return design;
  }
  return gap;
}

json resolve_config(Suite s, const json& user) {
  const json* given = user.is_null() ? nullptr : &user;
  return resolve(schema(s), given, "config");
}

json load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config " + path.string());
  try {
    return json::parse(in, nullptr, true, true);
  } catch (const json::parse_error& e) {
    throw ConfigError(path.string() + ": " + e.what());
  }
}

}  // namespace icb::cli
