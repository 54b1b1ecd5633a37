#include "icb/designer/embeddings.hpp"

#include <array>
#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "icb/common/numeric.hpp"

namespace icb::designer {

namespace {

constexpr std::array<char, 5> kMagic{'I', 'C', 'B', 'E', '1'};

static_assert(std::endian::native == std::endian::little,
              "embedding container I/O assumes a little-endian host");

// Normalizes in place and enforces the shared dimension and unique ids.
void finish(std::vector<EmbeddedSentence>& out, const std::string& origin) {
  std::set<std::string, std::less<>> seen;
  std::size_t dim = 0;
  for (std::size_t r = 0; r < out.size(); ++r) {
    EmbeddedSentence& s = out[r];
    const std::string where = origin + " record " + std::to_string(r + 1) + " (id '" + s.id + "')";
    if (!seen.insert(s.id).second) throw DuplicateIdError(where + ": duplicate id");
    if (s.tokens.empty()) throw ParseError(where + ": token list is empty");
    if (s.vector.empty()) throw ParseError(where + ": vector is empty");
    if (r == 0) dim = s.vector.size();
    if (s.vector.size() != dim)
      throw DimensionMismatchError(where + ": dimension " + std::to_string(s.vector.size()) +
                                   ", expected " + std::to_string(dim));
    for (double v : s.vector)
      if (!std::isfinite(v)) throw ParseError(where + ": non-finite vector entry");
    const double norm = std::sqrt(compensated_dot(s.vector, s.vector));
    if (norm == 0.0) throw DegenerateVectorError(where + ": zero vector cannot be normalized");
    for (double& v : s.vector) v /= norm;
  }
}

template <class T>
T get(std::istream& in, const std::string& what) {
  T v{};
  if (!in.read(reinterpret_cast<char*>(&v), sizeof v)) throw ParseError(what);
  return v;
}

template <class T>
void put(std::ostream& out, T v) {
  out.write(reinterpret_cast<const char*>(&v), sizeof v);
}

}  // namespace

EmbeddingFormat format_from_path(const std::filesystem::path& path) {
  const auto ext = path.extension().string();
  return (ext == ".bin" || ext == ".icbe") ? EmbeddingFormat::binary : EmbeddingFormat::jsonl;
}

std::vector<EmbeddedSentence> read_jsonl_embeddings(std::istream& in, SentenceSource source,
                                                    const std::string& origin) {
  std::vector<EmbeddedSentence> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const std::string where = origin + ":" + std::to_string(line_no);
    nlohmann::json rec;
    try {
      rec = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw ParseError(where + ": " + e.what());
    }
    try {
      EmbeddedSentence s;
      s.id = rec.at("id").get<std::string>();
      s.tokens = rec.at("tokens").get<std::vector<int>>();
      s.vector = rec.at("vector").get<std::vector<double>>();
      s.source = source;
      if (rec.contains("source")) {
        const auto tag = rec["source"].get<std::string>();
        if (tag == "task") s.source = SentenceSource::task;
        else if (tag == "corpus") s.source = SentenceSource::corpus;
        else throw ParseError(where + ": source must be 'task' or 'corpus'");
      }
      for (int t : s.tokens)
        if (t < 0) throw ParseError(where + ": negative token id");
      out.push_back(std::move(s));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(where + ": " + e.what());
    }
  }
  finish(out, origin);
  return out;
}

std::vector<EmbeddedSentence> read_binary_embeddings(std::istream& in, SentenceSource source,
                                                     const std::string& origin) {
  std::vector<EmbeddedSentence> out;
  std::array<char, 5> magic{};
  if (!in.read(magic.data(), magic.size())) {
    if (in.gcount() == 0) return out;  // empty file
    throw ParseError(origin + ": truncated header");
  }
  if (magic != kMagic) throw ParseError(origin + ": bad magic (expected ICBE1)");
  const auto dim = get<std::uint32_t>(in, origin + ": missing dimension");
  while (in.peek() != std::char_traits<char>::eof()) {
    const std::string where = origin + " record " + std::to_string(out.size() + 1);
    EmbeddedSentence s;
    s.source = source;
    const auto id_len = get<std::uint32_t>(in, where + ": truncated id length");
    s.id.resize(id_len);
    if (!in.read(s.id.data(), id_len)) throw ParseError(where + ": truncated id");
    const auto count = get<std::uint32_t>(in, where + ": truncated token count");
    for (std::uint32_t t = 0; t < count; ++t)
      s.tokens.push_back(static_cast<int>(get<std::uint32_t>(in, where + ": truncated tokens")));
    for (std::uint32_t k = 0; k < dim; ++k)
      s.vector.push_back(get<float>(in, where + ": truncated vector"));
    out.push_back(std::move(s));
  }
  finish(out, origin);
  return out;
}

std::vector<EmbeddedSentence> ingest_embeddings(const std::filesystem::path& path,
                                                EmbeddingFormat format, SentenceSource source) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return format == EmbeddingFormat::binary ? read_binary_embeddings(in, source, path.string())
                                           : read_jsonl_embeddings(in, source, path.string());
}

void write_binary_embeddings(std::ostream& out, const std::vector<EmbeddedSentence>& sentences) {
  out.write(kMagic.data(), kMagic.size());
  const auto dim = sentences.empty() ? 0u : static_cast<std::uint32_t>(sentences.front().vector.size());
  put<std::uint32_t>(out, dim);
  for (const auto& s : sentences) {
    if (s.vector.size() != dim) throw DimensionMismatchError("write_binary_embeddings: mixed dimensions");
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.id.size()));
    out.write(s.id.data(), static_cast<std::streamsize>(s.id.size()));
    put<std::uint32_t>(out, static_cast<std::uint32_t>(s.tokens.size()));
    for (int t : s.tokens) put<std::uint32_t>(out, static_cast<std::uint32_t>(t));
    for (double v : s.vector) put<float>(out, static_cast<float>(v));
  }
}

void write_jsonl_embeddings(std::ostream& out, const std::vector<EmbeddedSentence>& sentences) {
  for (const auto& s : sentences) {
    nlohmann::ordered_json rec;
    rec["id"] = s.id;
    rec["tokens"] = s.tokens;
    rec["vector"] = s.vector;
    rec["source"] = s.source == SentenceSource::task ? "task" : "corpus";
    out << rec.dump() << '\n';
  }
}

std::vector<int> WhitespaceTokenizer::encode(std::string_view text) {
  std::vector<int> out;
  std::istringstream words{std::string(text)};
  std::string w;
  while (words >> w) {
    auto it = ids_.find(w);
    if (it == ids_.end()) it = ids_.emplace(w, static_cast<int>(ids_.size())).first;
    out.push_back(it->second);
  }
  return out;
}

}  // namespace icb::designer
