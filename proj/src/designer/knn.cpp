#include "icb/designer/knn.hpp"

#include <algorithm>

#include "icb/common/numeric.hpp"
#include "icb/common/parallel.hpp"

namespace icb::designer {

bool ranks_before(const Neighbor& a, const Neighbor& b) {
  if (a.cosine != b.cosine) return a.cosine > b.cosine;
  return a.id < b.id;
}

double cosine(const EmbeddedSentence& a, const EmbeddedSentence& b) {
  if (a.vector.size() != b.vector.size())
    throw DimensionMismatchError("cosine: '" + a.id + "' and '" + b.id + "' differ in dimension");
  return std::clamp(compensated_dot(a.vector, b.vector), -1.0, 1.0);
}

namespace {

void keep_top(std::vector<Neighbor>& list, std::size_t k) {
  std::sort(list.begin(), list.end(), ranks_before);
  if (list.size() > k) list.resize(k);
}

}  // namespace

std::vector<NeighborList> knn_search(const std::vector<EmbeddedSentence>& queries,
                                     const std::vector<EmbeddedSentence>& corpus,
                                     const KnnParams& params) {
  if (!(params.threshold >= -1.0 && params.threshold <= 1.0))
    throw InputError("knn_search: threshold must lie in [-1, 1]");
  if (params.shard_size == 0) throw InputError("knn_search: shard size must be positive");
  if (!queries.empty() && !corpus.empty() &&
      queries.front().vector.size() != corpus.front().vector.size())
    throw DimensionMismatchError("knn_search: query and corpus dimensions differ");

  const std::size_t shards = (corpus.size() + params.shard_size - 1) / params.shard_size;
  // partial[s][q]: top-k of query q within shard s.
  std::vector<std::vector<std::vector<Neighbor>>> partial(
      shards, std::vector<std::vector<Neighbor>>(queries.size()));
  parallel_for(shards, params.threads, [&](std::size_t s) {
    const std::size_t begin = s * params.shard_size;
    const std::size_t end = std::min(corpus.size(), begin + params.shard_size);
    for (std::size_t q = 0; q < queries.size(); ++q) {
      auto& list = partial[s][q];
      for (std::size_t c = begin; c < end; ++c) {
        if (corpus[c].id == queries[q].id) continue;
        const double cos = cosine(queries[q], corpus[c]);
        if (cos >= params.threshold) list.push_back({corpus[c].id, cos});
      }
      keep_top(list, params.k);
    }
  });

  // The ranking is a total order, so merging shard winners gives the same
  // list however the corpus was split.
  std::vector<NeighborList> out(queries.size());
  for (std::size_t q = 0; q < queries.size(); ++q) {
    out[q].query_id = queries[q].id;
    for (std::size_t s = 0; s < shards; ++s)
      out[q].entries.insert(out[q].entries.end(), partial[s][q].begin(), partial[s][q].end());
    keep_top(out[q].entries, params.k);
  }
  return out;
}

}  // namespace icb::designer
