#pragma once

#include <cstdint>
#include <vector>

#include "icb/designer/knn.hpp"

namespace icb::designer {

struct NswParams {
  std::size_t max_degree = 16;
  std::size_t ef_construction = 64;
  std::size_t ef_search = 64;
  std::uint64_t seed = 0;
};

// Navigable small-world graph over a fixed corpus. Approximate: use
// measure_recall against knn_search before trusting it.
class NswIndex {
 public:
  NswIndex(const std::vector<EmbeddedSentence>& corpus, const NswParams& params);

  NeighborList search(const EmbeddedSentence& query, std::size_t k, double threshold) const;
  std::size_t size() const { return corpus_.size(); }

 private:
  std::vector<std::size_t> beam(const Vector& query, std::size_t ef, std::size_t limit) const;
  void link(std::size_t node, const std::vector<std::size_t>& candidates);

  const std::vector<EmbeddedSentence>& corpus_;
  NswParams params_;
  std::vector<std::vector<std::size_t>> edges_;
  std::size_t entry_ = 0;
};

// Fraction of exact neighbors also returned by the approximate lists.
double measure_recall(const std::vector<NeighborList>& exact,
                      const std::vector<NeighborList>& approximate);

}  // namespace icb::designer
