#include "icb/designer/examples.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <ostream>

#include <json.hpp>

#include "icb/common/random.hpp"

namespace icb::designer {

using V = ArrangementVariant;

const char* variant_name(V v) {
  switch (v) {
    case V::neighbors_in_context: return "neighbors_in_context";
    case V::random_in_context: return "random_in_context";
    case V::neighbors_in_batch: return "neighbors_in_batch";
    case V::random_in_batch: return "random_in_batch";
    case V::plain: return "plain";
  }
  return "?";
}

V parse_variant(const std::string& name) {
  for (V v : {V::neighbors_in_context, V::random_in_context, V::neighbors_in_batch,
              V::random_in_batch, V::plain})
    if (name == variant_name(v)) return v;
  throw InputError("unknown arrangement variant '" + name + "'");
}

TrainingExample pack_example(const EmbeddedSentence& anchor, const NeighborList& neighbors,
                             const Resolver& resolve, std::size_t budget, int sep_token) {
  if (anchor.tokens.size() > budget)
    throw InputError("pack_example: anchor '" + anchor.id + "' has " +
                     std::to_string(anchor.tokens.size()) + " tokens, over the budget of " +
                     std::to_string(budget));
  TrainingExample e;
  e.member_ids.push_back(anchor.id);
  e.tokens = anchor.tokens;
  for (const auto& n : neighbors.entries) {
    const EmbeddedSentence* s = resolve(n.id);
    if (!s) throw InputError("pack_example: unknown neighbor id '" + n.id + "'");
    if (e.tokens.size() + 1 + s->tokens.size() > budget) break;
    e.tokens.push_back(sep_token);
    e.tokens.insert(e.tokens.end(), s->tokens.begin(), s->tokens.end());
    e.member_ids.push_back(s->id);
  }
  return e;
}

namespace {

std::string example_id(V v, std::size_t index) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%s-%06zu", variant_name(v), index);
  return buf;
}

TrainingExample single(const EmbeddedSentence& s, int group) {
  TrainingExample e;
  e.member_ids.push_back(s.id);
  e.tokens = s.tokens;
  e.batch_group = group;
  return e;
}

}  // namespace

DatasetBuild build_dataset(V variant, const std::vector<EmbeddedSentence>& tasks,
                           const std::vector<EmbeddedSentence>& corpus, const DesignParams& params) {
  std::map<std::string, const EmbeddedSentence*> by_id;
  for (const auto& s : corpus) by_id.emplace(s.id, &s);
  const Resolver resolve = [&](const std::string& id) -> const EmbeddedSentence* {
    auto it = by_id.find(id);
    return it == by_id.end() ? nullptr : it->second;
  };

  DatasetBuild build;
  std::vector<const EmbeddedSentence*> anchors;
  for (const auto& t : tasks) {
    if (t.tokens.size() > params.budget) ++build.skipped_anchors;
    else anchors.push_back(&t);
  }

  std::vector<TrainingExample> packed;  // true-neighbor packing, one per anchor
  std::vector<const EmbeddedSentence*> pool;
  std::vector<std::size_t> per_anchor;
  if (variant != V::plain) {
    std::vector<EmbeddedSentence> queries;
    for (const auto* a : anchors) queries.push_back(*a);
    auto lists = knn_search(queries, corpus, params.knn);
    if (params.approximate) {
      const NswIndex index(corpus, params.nsw);
      std::vector<NeighborList> approx;
      for (const auto& q : queries) approx.push_back(index.search(q, params.knn.k, params.knn.threshold));
      build.recall = measure_recall(lists, approx);
      lists = std::move(approx);
    }
    std::set<std::string> used;
    for (std::size_t i = 0; i < anchors.size(); ++i) {
      if (params.dedup_pool)
        std::erase_if(lists[i].entries, [&](const Neighbor& n) { return used.count(n.id) > 0; });
      TrainingExample e = pack_example(*anchors[i], lists[i], resolve, params.budget, params.sep_token);
      per_anchor.push_back(e.member_ids.size() - 1);
      for (std::size_t m = 1; m < e.member_ids.size(); ++m) {
        pool.push_back(resolve(e.member_ids[m]));
        used.insert(e.member_ids[m]);
      }
      packed.push_back(std::move(e));
    }
  }

  Rng rng(params.seed);
  std::vector<TrainingExample> out;
  switch (variant) {
    case V::plain:
      for (const auto* a : anchors) out.push_back(single(*a, -1));
      break;
    case V::neighbors_in_context:
      out = std::move(packed);
      break;
    case V::neighbors_in_batch:
      for (std::size_t i = 0; i < packed.size(); ++i)
        for (std::size_t m = 0; m < packed[i].member_ids.size(); ++m)
          out.push_back(single(m == 0 ? *anchors[i] : *resolve(packed[i].member_ids[m]),
                               static_cast<int>(i)));
      break;
    case V::random_in_batch: {
      rng.shuffle(pool);
      std::size_t next = 0;
      for (std::size_t i = 0; i < anchors.size(); ++i) {
        out.push_back(single(*anchors[i], static_cast<int>(i)));
        for (std::size_t k = 0; k < per_anchor[i]; ++k) out.push_back(single(*pool[next++], static_cast<int>(i)));
      }
      break;
    }
    case V::random_in_context: {
      rng.shuffle(pool);
      for (const auto* a : anchors) out.push_back(single(*a, -1));
      std::vector<TrainingExample> standalone;
      for (const auto* item : pool) {
        // Random starting anchor, then the first one with room for sep + item.
        const std::size_t start = rng.below(out.size());
        bool placed = false;
        for (std::size_t probe = 0; probe < out.size() && !placed; ++probe) {
          TrainingExample& e = out[(start + probe) % out.size()];
          if (e.tokens.size() + 1 + item->tokens.size() <= params.budget) {
            e.tokens.push_back(params.sep_token);
            e.tokens.insert(e.tokens.end(), item->tokens.begin(), item->tokens.end());
            e.member_ids.push_back(item->id);
            placed = true;
          }
        }
        if (!placed) {
          standalone.push_back(single(*item, -1));
          ++build.standalone;
        }
      }
      out.insert(out.end(), standalone.begin(), standalone.end());
      break;
    }
  }
  for (std::size_t k = 0; k < out.size(); ++k) {
    out[k].arrangement = variant;
    out[k].example_id = example_id(variant, k);
  }
  build.examples = std::move(out);
  return build;
}

MixedBatches mix_batches(const std::vector<TrainingExample>& regular,
                         const std::vector<TrainingExample>& designed, std::size_t batch_size,
                         std::uint64_t seed) {
  if (batch_size == 0 || batch_size % 2 != 0)
    throw InputError("mix_batches: batch size must be a positive even number");
  const std::size_t half = batch_size / 2;
  const std::size_t count = std::min(regular.size() / half, designed.size() / half);
  MixedBatches out;
  for (std::size_t b = 0; b < count; ++b) {
    Rng rng(derive_seed(seed, b));
    std::vector<TrainingExample> r(regular.begin() + static_cast<std::ptrdiff_t>(b * half),
                                   regular.begin() + static_cast<std::ptrdiff_t>((b + 1) * half));
    std::vector<TrainingExample> d(designed.begin() + static_cast<std::ptrdiff_t>(b * half),
                                   designed.begin() + static_cast<std::ptrdiff_t>((b + 1) * half));
    rng.shuffle(r);
    rng.shuffle(d);
    r.insert(r.end(), d.begin(), d.end());
    out.batches.push_back(std::move(r));
  }
  out.regular_remainder = regular.size() - count * half;
  out.designed_remainder = designed.size() - count * half;
  return out;
}

std::string example_to_json(const TrainingExample& e) {
  nlohmann::ordered_json rec;
  rec["example_id"] = e.example_id;
  rec["arrangement"] = variant_name(e.arrangement);
  rec["member_ids"] = e.member_ids;
  rec["token_ids"] = e.tokens;
  rec["total_tokens"] = e.total_tokens();
  rec["batch_group"] = e.batch_group >= 0 ? nlohmann::ordered_json(e.batch_group) : nullptr;
  return rec.dump();
}

void write_dataset(std::ostream& out, const std::vector<TrainingExample>& examples) {
  for (const auto& e : examples) out << example_to_json(e) << '\n';
}

void export_dataset(const std::vector<TrainingExample>& examples, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  write_dataset(out, examples);
  out.flush();
  if (!out) throw IoError("write failed for " + path.string());
}

std::vector<TrainingExample> read_dataset(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::vector<TrainingExample> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    try {
      const auto rec = nlohmann::json::parse(line);
      TrainingExample e;
      e.example_id = rec.at("example_id").get<std::string>();
      e.arrangement = parse_variant(rec.at("arrangement").get<std::string>());
      e.member_ids = rec.at("member_ids").get<std::vector<std::string>>();
      e.tokens = rec.at("token_ids").get<std::vector<int>>();
      if (rec.at("total_tokens").get<std::size_t>() != e.tokens.size())
        throw ParseError("total_tokens disagrees with token_ids");
      const auto& g = rec.at("batch_group");
      e.batch_group = g.is_null() ? -1 : g.get<int>();
      out.push_back(std::move(e));
    } catch (const nlohmann::json::exception& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    } catch (const ParseError& e) {
      throw ParseError(path.string() + ":" + std::to_string(line_no) + ": " + e.what());
    }
  }
  return out;
}

}  // namespace icb::designer
