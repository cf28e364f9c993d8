#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "strata/common/error.h"
#include "strata/index/embedder.h"
#include "strata/index/flat_store.h"
#include "support.h"

using namespace strata;
using namespace strata::index;

TEST(Normalize, ScalesToUnitNorm) {
  std::vector<float> v{3.0f, 4.0f};
  ASSERT_TRUE(normalize(v));
  EXPECT_NEAR(v[0], 0.6f, 1e-7);
  EXPECT_NEAR(v[1], 0.8f, 1e-7);
  std::vector<float> zero{0.0f, 0.0f};
  EXPECT_FALSE(normalize(zero));
  EXPECT_EQ(zero[0], 0.0f);
}

TEST(Dot, AccumulatesInDouble) {
  const std::vector<float> a{1.0f, 2.0f, 3.0f};
  const std::vector<float> b{4.0f, -5.0f, 6.0f};
  EXPECT_DOUBLE_EQ(dot(a, b), 12.0);
}

TEST(FlatVectorStore, TopKMatchesBruteForce) {
  std::mt19937_64 rng(11);
  FlatVectorStore store("episode", 12);
  std::vector<std::vector<float>> rows;
  for (int i = 0; i < 300; ++i) {
    rows.push_back(strata::testing::random_unit(12, rng));
    store.add(rows.back(), "o" + std::to_string(i));
  }
  for (int trial = 0; trial < 20; ++trial) {
    const auto q = strata::testing::random_unit(12, rng);
    std::vector<std::uint32_t> order(rows.size());
    std::iota(order.begin(), order.end(), 0u);
    std::vector<double> sims;
    for (const auto& r : rows) sims.push_back(dot(q, r));
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return sims[a] > sims[b]; });
    const auto hits = store.top_k(q, 25);
    ASSERT_EQ(hits.size(), 25u);
    for (std::size_t i = 0; i < hits.size(); ++i) {
      EXPECT_EQ(hits[i].row, order[i]);
      EXPECT_DOUBLE_EQ(hits[i].similarity, sims[order[i]]);
      EXPECT_DOUBLE_EQ(hits[i].distance, 1.0 - sims[order[i]]);
      EXPECT_EQ(hits[i].owner, "o" + std::to_string(order[i]));
    }
  }
}

TEST(FlatVectorStore, TiesBreakByRow) {
  FlatVectorStore store("facet", 2);
  const std::vector<float> v{1.0f, 0.0f};
  const std::vector<float> w{0.0f, 1.0f};
  store.add(w, "w");
  store.add(v, "a");
  store.add(v, "b");
  store.add(v, "c");
  const auto hits = store.top_k(v, 3);
  ASSERT_EQ(hits.size(), 3u);
  EXPECT_EQ(hits[0].row, 1u);
  EXPECT_EQ(hits[1].row, 2u);
  EXPECT_EQ(hits[2].row, 3u);
}

TEST(FlatVectorStore, SmallAndEmptyStores) {
  FlatVectorStore store("entity", 3);
  const std::vector<float> q{1.0f, 0.0f, 0.0f};
  EXPECT_TRUE(store.top_k(q, 5).empty());
  store.add(q, "x");
  EXPECT_EQ(store.top_k(q, 5).size(), 1u);
  EXPECT_THROW(store.top_k(q, 0), InputError);
}

TEST(FlatVectorStore, RejectsWrongDimension) {
  FlatVectorStore store("entity", 3);
  const std::vector<float> bad{1.0f, 0.0f};
  EXPECT_ANY_THROW(store.add(bad, "x"));
}

TEST(FlatVectorStore, FromRowsRebuildsData) {
  FlatVectorStore store("episode", 2);
  store.add(std::vector<float>{1.0f, 0.0f}, "a");
  store.add(std::vector<float>{0.0f, 1.0f}, "b");
  FlatVectorStore copy =
      FlatVectorStore::from_rows("episode", 2, std::vector<float>(store.data().begin(), store.data().end()));
  EXPECT_EQ(copy.size(), 2u);
  copy.set_owner(0, "a");
  copy.set_owner(1, "b");
  EXPECT_EQ(copy, store);
}

TEST(VectorStores, RoutesLayersAndEdgeKinds) {
  EXPECT_EQ(store_for(graph::Layer::kEpisode), StoreName::kEpisode);
  EXPECT_EQ(store_for(graph::Layer::kFacetPoint), StoreName::kFacetPoint);
  EXPECT_EQ(store_for(graph::EdgeKind::kSemantic), StoreName::kEdgeSemantic);
  EXPECT_EQ(store_for(graph::EdgeKind::kCausal), StoreName::kEdgeRelation);
  EXPECT_EQ(store_for(graph::EdgeKind::kInvolvesEntity), StoreName::kEdgeRelation);
  for (StoreName s : kAllStores) EXPECT_EQ(parse_store_name(to_string(s)), s);
  VectorStores stores(4);
  for (StoreName s : kAllStores) EXPECT_EQ(stores[s].dimension(), 4u);
}

TEST(HashEmbedder, DeterministicAndDimensioned) {
  HashEmbedder a(64), b(64);
  const auto va = a.embed_raw("Melanie went to the pottery class");
  EXPECT_EQ(va.size(), 64u);
  EXPECT_EQ(va, b.embed_raw("Melanie went to the pottery class"));
  EXPECT_NE(va, a.embed_raw("something else entirely"));
  EXPECT_NE(HashEmbedder(64, 1).embed_raw("x"), HashEmbedder(64, 2).embed_raw("x"));
}

TEST(HashEmbedder, SharedWordsAreCloser) {
  HashEmbedder e(128);
  const auto base = embed_and_normalize(e, "pottery class on Tuesday with Melanie");
  const auto near = embed_and_normalize(e, "Melanie pottery class");
  const auto far = embed_and_normalize(e, "quarterly revenue forecast spreadsheet");
  EXPECT_GT(dot(base, near), dot(base, far));
  EXPECT_NEAR(dot(base, base), 1.0, 1e-6);
}

TEST(HashEmbedder, CaseInsensitiveTokens) {
  HashEmbedder e(32);
  EXPECT_EQ(e.embed_raw("Hello World"), e.embed_raw("hello, world!"));
}

TEST(EmbedAndNormalize, RejectsBlankText) {
  HashEmbedder e(16);
  EXPECT_THROW(embed_and_normalize(e, "   "), InputError);
}
