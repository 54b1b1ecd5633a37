#include "icb/designer/approx_index.hpp"

#include <algorithm>
#include <numeric>
#include <queue>
#include <set>
#include <unordered_set>

#include "icb/common/numeric.hpp"
#include "icb/common/random.hpp"

namespace icb::designer {

namespace {

struct Scored {
  double cos;
  std::size_t node;
};
struct Closer {  // max-heap on cosine
  bool operator()(const Scored& a, const Scored& b) const {
    return a.cos != b.cos ? a.cos < b.cos : a.node > b.node;
  }
};
struct Farther {  // min-heap on cosine
  bool operator()(const Scored& a, const Scored& b) const {
    return a.cos != b.cos ? a.cos > b.cos : a.node < b.node;
  }
};

}  // namespace

NswIndex::NswIndex(const std::vector<EmbeddedSentence>& corpus, const NswParams& params)
    : corpus_(corpus), params_(params), edges_(corpus.size()) {
  if (params_.max_degree == 0 || params_.ef_construction == 0 || params_.ef_search == 0)
    throw InputError("NswIndex: degree and beam widths must be positive");
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  Rng rng(params_.seed);
  rng.shuffle(order);
  if (order.empty()) return;
  entry_ = order.front();
  for (std::size_t k = 1; k < order.size(); ++k) {
    const std::size_t node = order[k];
    link(node, beam(corpus_[node].vector, params_.ef_construction, params_.max_degree));
  }
}

std::vector<std::size_t> NswIndex::beam(const Vector& query, std::size_t ef, std::size_t limit) const {
  std::unordered_set<std::size_t> visited{entry_};
  std::priority_queue<Scored, std::vector<Scored>, Closer> frontier;
  std::priority_queue<Scored, std::vector<Scored>, Farther> best;
  const Scored start{compensated_dot(query, corpus_[entry_].vector), entry_};
  frontier.push(start);
  best.push(start);
  while (!frontier.empty()) {
    const Scored cur = frontier.top();
    frontier.pop();
    if (best.size() >= ef && cur.cos < best.top().cos) break;
    for (std::size_t nb : edges_[cur.node]) {
      if (!visited.insert(nb).second) continue;
      const Scored s{compensated_dot(query, corpus_[nb].vector), nb};
      if (best.size() < ef || s.cos > best.top().cos) {
        frontier.push(s);
        best.push(s);
        if (best.size() > ef) best.pop();
      }
    }
  }
  std::vector<Scored> found;
  while (!best.empty()) {
    found.push_back(best.top());
    best.pop();
  }
  std::sort(found.begin(), found.end(), Farther{});
  std::vector<std::size_t> out;
  for (const auto& s : found) {
    if (out.size() == limit) break;
    out.push_back(s.node);
  }
  return out;
}

void NswIndex::link(std::size_t node, const std::vector<std::size_t>& candidates) {
  for (std::size_t c : candidates) {
    if (c == node) continue;
    edges_[node].push_back(c);
    auto& back = edges_[c];
    back.push_back(node);
    if (back.size() > params_.max_degree) {
      // Keep the closest neighbors of c.
      std::sort(back.begin(), back.end(), [&](std::size_t x, std::size_t y) {
        const double cx = compensated_dot(corpus_[c].vector, corpus_[x].vector);
        const double cy = compensated_dot(corpus_[c].vector, corpus_[y].vector);
        return cx != cy ? cx > cy : x < y;
      });
      back.resize(params_.max_degree);
    }
  }
}

NeighborList NswIndex::search(const EmbeddedSentence& query, std::size_t k, double threshold) const {
  NeighborList out;
  out.query_id = query.id;
  if (corpus_.empty()) return out;
  if (query.vector.size() != corpus_.front().vector.size())
    throw DimensionMismatchError("NswIndex::search: dimension mismatch");
  for (std::size_t node : beam(query.vector, std::max(params_.ef_search, k + 1), k + 1)) {
    if (corpus_[node].id == query.id) continue;
    const double cos = cosine(query, corpus_[node]);
    if (cos >= threshold) out.entries.push_back({corpus_[node].id, cos});
  }
  std::sort(out.entries.begin(), out.entries.end(), ranks_before);
  if (out.entries.size() > k) out.entries.resize(k);
  return out;
}

double measure_recall(const std::vector<NeighborList>& exact,
                      const std::vector<NeighborList>& approximate) {
  if (exact.size() != approximate.size()) throw InputError("measure_recall: list counts differ");
  std::size_t total = 0, hit = 0;
  for (std::size_t q = 0; q < exact.size(); ++q) {
    std::set<std::string> found;
    for (const auto& e : approximate[q].entries) found.insert(e.id);
    for (const auto& e : exact[q].entries) {
      ++total;
      if (found.count(e.id)) ++hit;
    }
  }
  return total == 0 ? 1.0 : static_cast<double>(hit) / static_cast<double>(total);
}

}  // namespace icb::designer
