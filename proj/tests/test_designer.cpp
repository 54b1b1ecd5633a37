#include <gtest/gtest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "icb/common/random.hpp"
#include "icb/designer/approx_index.hpp"
#include "icb/designer/embeddings.hpp"
#include "icb/designer/examples.hpp"
#include "icb/designer/knn.hpp"

namespace icb::designer {
namespace {

const std::filesystem::path kFixtures = ICB_FIXTURES;

std::vector<EmbeddedSentence> clusters() {
  return ingest_embeddings(kFixtures / "clusters.jsonl", EmbeddingFormat::jsonl);
}

std::vector<EmbeddedSentence> parse(const std::string& text) {
  std::istringstream in(text);
  return read_jsonl_embeddings(in, SentenceSource::task, "test");
}

std::vector<EmbeddedSentence> random_corpus(int n, int dim, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<EmbeddedSentence> out;
  for (int i = 0; i < n; ++i) {
    EmbeddedSentence s;
    char id[16];
    std::snprintf(id, sizeof id, "s%04d", i);
    s.id = id;
    s.tokens = {1 + i % 7, 2, 3};
    double norm = 0.0;
    for (int k = 0; k < dim; ++k) {
      s.vector.push_back(rng.normal());
      norm += s.vector.back() * s.vector.back();
    }
    for (auto& v : s.vector) v /= std::sqrt(norm);
    out.push_back(std::move(s));
  }
  return out;
}

std::string cluster_of(const std::string& id) { return id.substr(0, id.find('-')); }

std::multiset<std::string> member_multiset(const std::vector<TrainingExample>& xs) {
  std::multiset<std::string> out;
  for (const auto& e : xs) out.insert(e.member_ids.begin(), e.member_ids.end());
  return out;
}

TEST(Embeddings, JsonlIngestNormalizes) {
  const auto s = parse(R"({"id":"x","tokens":[1,2],"vector":[3,4]})"
                       "\n"
                       R"({"id":"y","tokens":[5],"vector":[0,2],"source":"corpus"})"
                       "\n");
  ASSERT_EQ(s.size(), 2u);
  EXPECT_DOUBLE_EQ(s[0].vector[0], 0.6);
  EXPECT_DOUBLE_EQ(s[0].vector[1], 0.8);
  EXPECT_EQ(s[1].source, SentenceSource::corpus);
  EXPECT_EQ(s[1].tokens, (std::vector<int>{5}));
}

TEST(Embeddings, JsonlErrors) {
  EXPECT_THROW(parse("{not json}\n"), ParseError);
  EXPECT_THROW(parse(R"({"id":"x","tokens":[1],"vector":[1,0]})"
                     "\n"
                     R"({"id":"y","tokens":[1],"vector":[1,0,0]})"),
               DimensionMismatchError);
  EXPECT_THROW(parse(R"({"id":"x","tokens":[1],"vector":[1,0]})"
                     "\n"
                     R"({"id":"x","tokens":[2],"vector":[0,1]})"),
               DuplicateIdError);
  EXPECT_THROW(parse(R"({"id":"x","tokens":[1],"vector":[0,0]})"), DegenerateVectorError);
  EXPECT_THROW(parse(R"({"id":"x","tokens":[],"vector":[1]})"), ParseError);
  EXPECT_THROW(parse(R"({"id":"x","tokens":[-1],"vector":[1]})"), ParseError);
  EXPECT_THROW(parse(R"({"id":"x","tokens":[1]})"), ParseError);
  EXPECT_TRUE(parse("").empty());
}

TEST(Embeddings, BinaryRoundTrip) {
  const auto a = clusters();
  std::stringstream buf;
  write_binary_embeddings(buf, a);
  const auto b = read_binary_embeddings(buf, SentenceSource::task);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    EXPECT_EQ(a[i].tokens, b[i].tokens);
    for (std::size_t k = 0; k < a[i].vector.size(); ++k) EXPECT_NEAR(a[i].vector[k], b[i].vector[k], 1e-6);
  }
  std::stringstream empty;
  EXPECT_TRUE(read_binary_embeddings(empty, SentenceSource::task).empty());
  std::stringstream junk("XXXXXXXXXXXX");
  EXPECT_THROW(read_binary_embeddings(junk, SentenceSource::task), ParseError);
  EXPECT_EQ(format_from_path("a/b.bin"), EmbeddingFormat::binary);
  EXPECT_EQ(format_from_path("a/b.icbe"), EmbeddingFormat::binary);
  EXPECT_EQ(format_from_path("a/b.jsonl"), EmbeddingFormat::jsonl);
}

TEST(Embeddings, JsonlRoundTrip) {
  const auto a = clusters();
  std::stringstream buf;
  write_jsonl_embeddings(buf, a);
  const auto b = read_jsonl_embeddings(buf, SentenceSource::task);
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].id, b[i].id);
    for (std::size_t k = 0; k < a[i].vector.size(); ++k) EXPECT_NEAR(a[i].vector[k], b[i].vector[k], 1e-15);
  }
}

TEST(Tokenizer, AssignsIdsInOrder) {
  WhitespaceTokenizer t;
  EXPECT_EQ(t.encode("the cat  saw the\tdog"), (std::vector<int>{0, 1, 2, 0, 3}));
  EXPECT_EQ(t.vocabulary_size(), 4);
  EXPECT_TRUE(t.encode("   ").empty());
}

TEST(Knn, ClusterPureAtThreshold) {
  const auto c = clusters();
  const auto lists = knn_search(c, c, KnnParams{});
  ASSERT_EQ(lists.size(), 15u);
  for (const auto& l : lists) {
    EXPECT_EQ(l.entries.size(), 4u) << l.query_id;
    for (const auto& n : l.entries) {
      EXPECT_EQ(cluster_of(n.id), cluster_of(l.query_id));
      EXPECT_NE(n.id, l.query_id);
      EXPECT_GE(n.cosine, 0.8);
    }
  }
}

TEST(Knn, MatchesSortedScan) {
  const auto corpus = random_corpus(300, 6, 4);
  const std::vector<EmbeddedSentence> queries(corpus.begin(), corpus.begin() + 20);
  KnnParams p;
  p.k = 7;
  p.threshold = -1.0;
  p.shard_size = 37;
  const auto lists = knn_search(queries, corpus, p);
  for (std::size_t q = 0; q < queries.size(); ++q) {
    std::vector<Neighbor> all;
    for (const auto& s : corpus)
      if (s.id != queries[q].id) all.push_back({s.id, cosine(queries[q], s)});
    std::sort(all.begin(), all.end(), ranks_before);
    all.resize(7);
    EXPECT_EQ(lists[q].entries, all);
  }
  p.threads = 3;
  p.shard_size = 5;
  EXPECT_EQ(knn_search(queries, corpus, p), lists);
}

TEST(Knn, TiesBreakById) {
  EXPECT_TRUE(ranks_before({"b", 0.9}, {"a", 0.8}));
  EXPECT_TRUE(ranks_before({"a", 0.9}, {"b", 0.9}));
  EXPECT_FALSE(ranks_before({"b", 0.9}, {"a", 0.9}));
}

TEST(Knn, ThreeRecordFixture) {
  const auto s = ingest_embeddings(kFixtures / "three.jsonl", EmbeddingFormat::jsonl);
  const auto lists = knn_search(s, s, KnnParams{});
  EXPECT_EQ(lists[0].entries.size(), 1u);
  EXPECT_EQ(lists[0].entries[0].id, "b");
  EXPECT_NEAR(lists[0].entries[0].cosine, 0.96, 1e-12);
  EXPECT_TRUE(lists[2].entries.empty());
}

TEST(ApproxIndex, RecallOnRandomCorpus) {
  const auto corpus = random_corpus(600, 8, 9);
  const std::vector<EmbeddedSentence> queries(corpus.begin(), corpus.begin() + 50);
  KnnParams p;
  p.k = 10;
  p.threshold = -1.0;
  const auto exact = knn_search(queries, corpus, p);
  const NswIndex index(corpus, NswParams{});
  std::vector<NeighborList> approx;
  for (const auto& q : queries) approx.push_back(index.search(q, 10, -1.0));
  EXPECT_GE(measure_recall(exact, approx), 0.9);
  EXPECT_EQ(measure_recall(exact, exact), 1.0);
  for (const auto& l : approx)
    for (std::size_t k = 1; k < l.entries.size(); ++k) EXPECT_TRUE(ranks_before(l.entries[k - 1], l.entries[k]));
}

TEST(ApproxIndex, ExactOnClusters) {
  const auto c = clusters();
  DesignParams p;
  p.approximate = true;
  const auto approx = build_dataset(ArrangementVariant::neighbors_in_context, c, c, p);
  p.approximate = false;
  const auto exact = build_dataset(ArrangementVariant::neighbors_in_context, c, c, p);
  EXPECT_EQ(approx.recall, 1.0);
  EXPECT_EQ(approx.examples, exact.examples);
}

TEST(Packing, BudgetAndSeparators) {
  const auto c = clusters();
  std::map<std::string, const EmbeddedSentence*> by_id;
  for (const auto& s : c) by_id[s.id] = &s;
  const Resolver resolve = [&](const std::string& id) -> const EmbeddedSentence* {
    auto it = by_id.find(id);
    return it == by_id.end() ? nullptr : it->second;
  };
  const auto lists = knn_search(c, c, KnnParams{});
  const auto full = pack_example(c[0], lists[0], resolve, 10000, -7);
  EXPECT_EQ(full.member_ids.size(), 5u);
  EXPECT_EQ(std::count(full.tokens.begin(), full.tokens.end(), -7), 4);
  std::size_t expected = c[0].tokens.size();
  for (const auto& n : lists[0].entries) expected += 1 + by_id[n.id]->tokens.size();
  EXPECT_EQ(full.total_tokens(), expected);

  const std::size_t budget = c[0].tokens.size() + 1 + by_id[lists[0].entries[0].id]->tokens.size();
  const auto tight = pack_example(c[0], lists[0], resolve, budget, 0);
  EXPECT_EQ(tight.member_ids.size(), 2u);
  EXPECT_EQ(tight.total_tokens(), budget);
  EXPECT_THROW(pack_example(c[0], lists[0], resolve, 2, 0), InputError);
  NeighborList bogus{"x", {{"nobody", 0.9}}};
  EXPECT_THROW(pack_example(c[0], bogus, resolve, 1000, 0), InputError);
}

TEST(Dataset, VariantsConserveSentenceMultiset) {
  const auto c = clusters();
  DesignParams p;
  p.seed = 3;
  const auto reference = member_multiset(build_dataset(ArrangementVariant::neighbors_in_context, c, c, p).examples);
  EXPECT_EQ(reference.size(), 15u * 5u);
  for (auto v : {ArrangementVariant::random_in_context, ArrangementVariant::neighbors_in_batch,
                 ArrangementVariant::random_in_batch}) {
    const auto build = build_dataset(v, c, c, p);
    EXPECT_EQ(member_multiset(build.examples), reference) << variant_name(v);
    for (const auto& e : build.examples) EXPECT_LE(e.total_tokens(), 256u);
  }
  const auto plain = build_dataset(ArrangementVariant::plain, c, c, p);
  EXPECT_EQ(plain.examples.size(), 15u);
}

TEST(Dataset, NeighborsInContextAreClusterPure) {
  const auto c = clusters();
  for (const auto& e : build_dataset(ArrangementVariant::neighbors_in_context, c, c, DesignParams{}).examples) {
    EXPECT_EQ(e.member_ids.size(), 5u);
    for (const auto& id : e.member_ids) EXPECT_EQ(cluster_of(id), cluster_of(e.member_ids[0]));
    EXPECT_EQ(e.batch_group, -1);
  }
}

TEST(Dataset, InBatchGroups) {
  const auto c = clusters();
  const auto build = build_dataset(ArrangementVariant::neighbors_in_batch, c, c, DesignParams{});
  ASSERT_EQ(build.examples.size(), 75u);
  for (const auto& e : build.examples) {
    EXPECT_EQ(e.member_ids.size(), 1u);
    ASSERT_GE(e.batch_group, 0);
    EXPECT_EQ(cluster_of(e.member_ids[0]), cluster_of(c[static_cast<std::size_t>(e.batch_group)].id));
  }
  const auto random = build_dataset(ArrangementVariant::random_in_batch, c, c, DesignParams{});
  std::map<int, int> sizes;
  for (const auto& e : random.examples) ++sizes[e.batch_group];
  for (const auto& [g, n] : sizes) EXPECT_EQ(n, 5);
}

TEST(Dataset, TightBudgetSkipsAndStandalone) {
  const auto c = clusters();
  DesignParams p;
  p.budget = 18;
  const auto ctx = build_dataset(ArrangementVariant::neighbors_in_context, c, c, p);
  std::size_t over = 0;
  for (const auto& s : c) over += s.tokens.size() > 18;
  EXPECT_EQ(ctx.skipped_anchors, over);
  for (const auto& e : ctx.examples) EXPECT_LE(e.total_tokens(), 18u);
  const auto rnd = build_dataset(ArrangementVariant::random_in_context, c, c, p);
  EXPECT_EQ(member_multiset(rnd.examples), member_multiset(ctx.examples));
  for (const auto& e : rnd.examples) EXPECT_LE(e.total_tokens(), 18u);
}

TEST(Dataset, DedupPoolDropsRepeats) {
  const auto c = clusters();
  DesignParams p;
  p.dedup_pool = true;
  const auto build = build_dataset(ArrangementVariant::neighbors_in_context, c, c, p);
  std::multiset<std::string> neighbors;
  for (const auto& e : build.examples) neighbors.insert(e.member_ids.begin() + 1, e.member_ids.end());
  for (const auto& id : neighbors) EXPECT_EQ(neighbors.count(id), 1u);
}

TEST(Dataset, DeterministicAcrossThreads) {
  const auto c = clusters();
  for (auto v : {ArrangementVariant::neighbors_in_context, ArrangementVariant::random_in_context,
                 ArrangementVariant::neighbors_in_batch, ArrangementVariant::random_in_batch}) {
    DesignParams p;
    p.seed = 11;
    std::ostringstream a, b;
    write_dataset(a, build_dataset(v, c, c, p).examples);
    p.knn.threads = 4;
    p.knn.shard_size = 2;
    write_dataset(b, build_dataset(v, c, c, p).examples);
    EXPECT_EQ(a.str(), b.str());
  }
}

TEST(Export, OrderedKeysAndRoundTrip) {
  const auto c = clusters();
  const auto build = build_dataset(ArrangementVariant::neighbors_in_batch, c, c, DesignParams{});
  const std::string line = example_to_json(build.examples[0]);
  EXPECT_EQ(line.rfind("{\"example_id\":\"neighbors_in_batch-000000\",\"arrangement\":", 0), 0u);
  EXPECT_LT(line.find("\"member_ids\""), line.find("\"token_ids\""));
  EXPECT_LT(line.find("\"total_tokens\""), line.find("\"batch_group\":0"));
  const auto plain = build_dataset(ArrangementVariant::plain, c, c, DesignParams{});
  EXPECT_NE(example_to_json(plain.examples[0]).find("\"batch_group\":null"), std::string::npos);

  const auto path = std::filesystem::temp_directory_path() / "icb_dataset_test.jsonl";
  export_dataset(build.examples, path);
  EXPECT_EQ(read_dataset(path), build.examples);
  std::filesystem::remove(path);
}

TEST(Batches, HalfRegularHalfDesigned) {
  const auto c = clusters();
  const auto designed = build_dataset(ArrangementVariant::neighbors_in_context, c, c, DesignParams{}).examples;
  auto regular = build_dataset(ArrangementVariant::plain,
                               ingest_embeddings(kFixtures / "regular.jsonl", EmbeddingFormat::jsonl), {},
                               DesignParams{})
                     .examples;
  const auto mixed = mix_batches(regular, designed, 4, 5);
  ASSERT_EQ(mixed.batches.size(), 5u);
  for (const auto& b : mixed.batches) {
    ASSERT_EQ(b.size(), 4u);
    EXPECT_EQ(b[0].arrangement, ArrangementVariant::plain);
    EXPECT_EQ(b[1].arrangement, ArrangementVariant::plain);
    EXPECT_EQ(b[2].arrangement, ArrangementVariant::neighbors_in_context);
    EXPECT_EQ(b[3].arrangement, ArrangementVariant::neighbors_in_context);
  }
  EXPECT_EQ(mixed.regular_remainder, 0u);
  EXPECT_EQ(mixed.designed_remainder, 5u);
  EXPECT_EQ(mix_batches(regular, designed, 4, 5).batches, mixed.batches);
  EXPECT_THROW(mix_batches(regular, designed, 3, 0), InputError);
  EXPECT_THROW(mix_batches(regular, designed, 0, 0), InputError);
}

TEST(Variants, NamesRoundTrip) {
  for (auto v : {ArrangementVariant::neighbors_in_context, ArrangementVariant::random_in_context,
                 ArrangementVariant::neighbors_in_batch, ArrangementVariant::random_in_batch,
                 ArrangementVariant::plain})
    EXPECT_EQ(parse_variant(variant_name(v)), v);
  EXPECT_THROW(parse_variant("mixed"), InputError);
}

}  // namespace
}  // namespace icb::designer
