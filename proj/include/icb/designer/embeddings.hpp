#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "icb/common/errors.hpp"
#include "icb/common/matrix.hpp"

namespace icb::designer {

enum class SentenceSource { task, corpus };

struct EmbeddedSentence {
  std::string id;
  std::vector<int> tokens;
  Vector vector;  // unit length after ingestion
  SentenceSource source = SentenceSource::task;
};

enum class EmbeddingFormat { jsonl, binary };

class ParseError : public InputError {
 public:
  using InputError::InputError;
};
class DimensionMismatchError : public InputError {
 public:
  using InputError::InputError;
};
class DuplicateIdError : public InputError {
 public:
  using InputError::InputError;
};
class DegenerateVectorError : public InputError {
 public:
  using InputError::InputError;
};

// ".bin" and ".icbe" are binary, everything else line-delimited JSON.
EmbeddingFormat format_from_path(const std::filesystem::path& path);

std::vector<EmbeddedSentence> ingest_embeddings(const std::filesystem::path& path,
                                                EmbeddingFormat format,
                                                SentenceSource source = SentenceSource::task);

// Stream variants; `origin` names the input in error messages.
std::vector<EmbeddedSentence> read_jsonl_embeddings(std::istream& in, SentenceSource source,
                                                    const std::string& origin = "<stream>");
std::vector<EmbeddedSentence> read_binary_embeddings(std::istream& in, SentenceSource source,
                                                     const std::string& origin = "<stream>");

void write_binary_embeddings(std::ostream& out, const std::vector<EmbeddedSentence>& sentences);
void write_jsonl_embeddings(std::ostream& out, const std::vector<EmbeddedSentence>& sentences);

// Whitespace tokenizer for fixtures; ids are assigned in order of first use.
class WhitespaceTokenizer {
 public:
  std::vector<int> encode(std::string_view text);
  int vocabulary_size() const { return static_cast<int>(ids_.size()); }

 private:
  std::map<std::string, int, std::less<>> ids_;
};

}  // namespace icb::designer
