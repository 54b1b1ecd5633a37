#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "icb/designer/approx_index.hpp"
#include "icb/designer/knn.hpp"

namespace icb::designer {

enum class ArrangementVariant {
  neighbors_in_context,
  random_in_context,
  neighbors_in_batch,
  random_in_batch,
  plain
};

const char* variant_name(ArrangementVariant v);
ArrangementVariant parse_variant(const std::string& name);

struct TrainingExample {
  std::string example_id;
  ArrangementVariant arrangement = ArrangementVariant::plain;
  std::vector<std::string> member_ids;
  std::vector<int> tokens;
  int batch_group = -1;  // in-batch variants only

  std::size_t total_tokens() const { return tokens.size(); }
  friend bool operator==(const TrainingExample&, const TrainingExample&) = default;
};

using Resolver = std::function<const EmbeddedSentence*(const std::string&)>;

// Anchor first, then neighbors in list order, each behind one separator,
// stopping at the first neighbor that would overflow the budget.
TrainingExample pack_example(const EmbeddedSentence& anchor, const NeighborList& neighbors,
                             const Resolver& resolve, std::size_t budget, int sep_token);

struct DesignParams {
  KnnParams knn;
  std::size_t budget = 256;
  int sep_token = 0;
  std::uint64_t seed = 0;
  bool dedup_pool = false;  // drop neighbors already packed for an earlier anchor
  bool approximate = false; // graph search instead of the exact scan
  NswParams nsw;
};

struct DatasetBuild {
  std::vector<TrainingExample> examples;
  std::size_t skipped_anchors = 0;  // anchors longer than the budget
  std::size_t standalone = 0;       // random_in_context items that fit no anchor
  double recall = 1.0;              // approximate neighbor recall against the exact scan
};

DatasetBuild build_dataset(ArrangementVariant variant, const std::vector<EmbeddedSentence>& tasks,
                           const std::vector<EmbeddedSentence>& corpus, const DesignParams& params);

struct MixedBatches {
  std::vector<std::vector<TrainingExample>> batches;  // regular half, then designed half
  std::size_t regular_remainder = 0;
  std::size_t designed_remainder = 0;
};

MixedBatches mix_batches(const std::vector<TrainingExample>& regular,
                         const std::vector<TrainingExample>& designed, std::size_t batch_size,
                         std::uint64_t seed);

std::string example_to_json(const TrainingExample& e);
void write_dataset(std::ostream& out, const std::vector<TrainingExample>& examples);
void export_dataset(const std::vector<TrainingExample>& examples, const std::filesystem::path& path);
std::vector<TrainingExample> read_dataset(const std::filesystem::path& path);

}  // namespace icb::designer
