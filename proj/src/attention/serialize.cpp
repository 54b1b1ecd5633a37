#include "icb/attention/serialize.hpp"

#include <array>
#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>

#include <json.hpp>

#include "icb/common/errors.hpp"

namespace icb::attention {

namespace {

constexpr std::array<char, 5> kMagic{'I', 'C', 'B', 'W', '1'};

static_assert(std::endian::native == std::endian::little,
              "weight container I/O assumes a little-endian host");

void put_u32(std::ostream& out, std::uint32_t v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

void put_f64(std::ostream& out, double v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

std::uint32_t get_u32(std::istream& in) {
  std::uint32_t v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError("weights: truncated header");
  return v;
}

double get_f64(std::istream& in) {
  double v = 0;
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw IoError("weights: truncated tensor data");
  return v;
}

}  // namespace

void write_weights(std::ostream& out, const NetworkWeights& w) {
  const HyperParams& h = w.hyper;
  out.write(kMagic.data(), kMagic.size());
  for (int v : {h.layers, h.heads, h.model_dim, h.head_dim, h.sentence_len, h.vocab_size})
    put_u32(out, static_cast<std::uint32_t>(v));
  put_f64(out, h.learning_rate);
  for (const Matrix* m : w.tensors())
    for (double v : m->values()) put_f64(out, v);
  if (!out) throw IoError("weights: write failed");
}

NetworkWeights read_weights(std::istream& in) {
  std::array<char, 5> magic{};
  if (!in.read(magic.data(), magic.size()) || magic != kMagic)
    throw IoError("weights: bad magic (expected ICBW1)");
  HyperParams h;
  h.layers = static_cast<int>(get_u32(in));
  h.heads = static_cast<int>(get_u32(in));
  h.model_dim = static_cast<int>(get_u32(in));
  h.head_dim = static_cast<int>(get_u32(in));
  h.sentence_len = static_cast<int>(get_u32(in));
  h.vocab_size = static_cast<int>(get_u32(in));
  h.learning_rate = get_f64(in);
  h.validate();
  NetworkWeights w = NetworkWeights::zeros(h);
  for (Matrix* m : w.tensors())
    for (double& v : m->values()) v = get_f64(in);
  if (in.peek() != std::char_traits<char>::eof()) throw IoError("weights: trailing bytes");
  return w;
}

void save_weights(const std::filesystem::path& path, const NetworkWeights& w) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_weights(out, w);
}

NetworkWeights load_weights(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  try {
    return read_weights(in);
  } catch (const IoError& e) {
    throw IoError(path.string() + ": " + e.what());
  }
}

std::string weights_to_json(const NetworkWeights& w) {
  using nlohmann::json;
  auto dump = [](const Matrix& m) {
    json rows = json::array();
    for (std::size_t r = 0; r < m.rows(); ++r) {
      auto row = m.row(r);
      rows.push_back(std::vector<double>(row.begin(), row.end()));
    }
    return rows;
  };
  const HyperParams& h = w.hyper;
  json doc;
  doc["format"] = "ICBW1";
  doc["hyper"] = {{"L", h.layers},         {"H", h.heads},      {"d_x", h.model_dim},
                  {"d_a", h.head_dim},     {"N", h.sentence_len}, {"V", h.vocab_size},
                  {"eta", h.learning_rate}};
  json layers = json::array();
  for (const auto& layer : w.layers) {
    json heads = json::array();
    for (const auto& hw : layer)
      heads.push_back({{"K", dump(hw.key)}, {"Q", dump(hw.query)},
                       {"V", dump(hw.value)}, {"O", dump(hw.output)}});
    layers.push_back(heads);
  }
  doc["layers"] = layers;
  doc["vocab_embed"] = dump(w.vocab);
  return doc.dump(2);
}

}  // namespace icb::attention
