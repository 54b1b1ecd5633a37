#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "icb/attention/weights.hpp"

namespace icb::attention {

void write_weights(std::ostream& out, const NetworkWeights& w);
NetworkWeights read_weights(std::istream& in);

void save_weights(const std::filesystem::path& path, const NetworkWeights& w);
NetworkWeights load_weights(const std::filesystem::path& path);

// Debug export; the binary container is canonical.
std::string weights_to_json(const NetworkWeights& w);

}  // namespace icb::attention
