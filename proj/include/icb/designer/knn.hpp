#pragma once

#include <string>
#include <vector>

#include "icb/designer/embeddings.hpp"

namespace icb::designer {

struct Neighbor {
  std::string id;
  double cosine = 0.0;
  friend bool operator==(const Neighbor&, const Neighbor&) = default;
};

// Cosine descending, then id ascending.
bool ranks_before(const Neighbor& a, const Neighbor& b);

struct NeighborList {
  std::string query_id;
  std::vector<Neighbor> entries;
  friend bool operator==(const NeighborList&, const NeighborList&) = default;
};

struct KnnParams {
  std::size_t k = 10;
  double threshold = 0.8;
  unsigned threads = 1;
  std::size_t shard_size = 1024;  // corpus rows per scan task
};

double cosine(const EmbeddedSentence& a, const EmbeddedSentence& b);

// Exact brute-force scan. Entries with the query's id are skipped.
std::vector<NeighborList> knn_search(const std::vector<EmbeddedSentence>& queries,
                                     const std::vector<EmbeddedSentence>& corpus,
                                     const KnnParams& params);

}  // namespace icb::designer
