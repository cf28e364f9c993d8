#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "strata/common/error.h"
#include "strata/graph/checkpoint.h"
#include "strata/graph/memory_graph.h"
#include "support.h"

namespace fs = std::filesystem;
using namespace strata;
using namespace strata::graph;

namespace {

Node make(const std::string& id, Layer layer, std::optional<std::string> ts = {}) {
  Node n;
  n.id = NodeId{id};
  n.layer = layer;
  n.text = id;
  n.conversation_id = "c";
  if (layer == Layer::kEpisode) n.timestamp = ts ? ts : std::optional<std::string>("2023-01-01T00:00:00");
  if (layer == Layer::kEntity) n.entity_type = "person";
  return n;
}

Edge link(EdgeKind kind, const std::string& src, const std::string& dst, std::optional<double> conf = {}) {
  Edge e;
  e.kind = kind;
  e.src = NodeId{src};
  e.dst = NodeId{dst};
  e.confidence = conf;
  return e;
}

// ep1 <- fc1 <- fp1 <- en1
MemoryGraph small_graph() {
  MemoryGraph g;
  g.add_node(make("ep:1", Layer::kEpisode, "2023-01-02T00:00:00"));
  g.add_node(make("fc:1", Layer::kFacet));
  g.add_node(make("fp:1", Layer::kFacetPoint));
  g.add_node(make("en:1", Layer::kEntity));
  g.add_edge(link(EdgeKind::kBelongsTo, "fc:1", "ep:1"));
  g.add_edge(link(EdgeKind::kBelongsTo, "fp:1", "fc:1"));
  g.add_edge(link(EdgeKind::kBelongsTo, "en:1", "fp:1"));
  return g;
}

class TempDir {
 public:
  TempDir()
      : path_(fs::temp_directory_path() /
              (std::string("strata_graph_") + ::testing::UnitTest::GetInstance()->current_test_info()->name())) {
    fs::remove_all(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

}  // namespace

TEST(MemoryGraph, AddsNodesAndSequentialEdgeIds) {
  MemoryGraph g = small_graph();
  EXPECT_EQ(g.node_count(), 4u);
  ASSERT_EQ(g.edge_count(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(g.edges()[i].id.value, i);
  EXPECT_EQ(g.node(NodeId{"fp:1"}).layer, Layer::kFacetPoint);
  EXPECT_EQ(g.find_node(NodeId{"nope"}), nullptr);
}

TEST(MemoryGraph, RejectsDuplicateNodeId) {
  MemoryGraph g = small_graph();
  EXPECT_THROW(g.add_node(make("ep:1", Layer::kEpisode)), GraphError);
}

TEST(MemoryGraph, RequiresEpisodeTimestamp) {
  MemoryGraph g;
  Node n = make("ep:x", Layer::kEpisode);
  n.timestamp.reset();
  EXPECT_THROW(g.add_node(n), GraphError);
}

TEST(MemoryGraph, EntityTypeOnlyOnEntities) {
  MemoryGraph g;
  Node fc = make("fc:x", Layer::kFacet);
  fc.entity_type = "person";
  EXPECT_THROW(g.add_node(fc), GraphError);
  Node en = make("en:x", Layer::kEntity);
  en.entity_type.reset();
  EXPECT_THROW(g.add_node(en), GraphError);
}

TEST(MemoryGraph, RejectsDanglingSelfLoopAndDuplicateEdges) {
  MemoryGraph g = small_graph();
  EXPECT_THROW(g.add_edge(link(EdgeKind::kSemantic, "fp:1", "missing")), GraphError);
  EXPECT_THROW(g.add_edge(link(EdgeKind::kSemantic, "fp:1", "fp:1")), GraphError);
  EXPECT_THROW(g.add_edge(link(EdgeKind::kBelongsTo, "fc:1", "ep:1")), GraphError);
}

TEST(MemoryGraph, BelongsToMustClimbLayers) {
  MemoryGraph g = small_graph();
  g.add_node(make("fc:2", Layer::kFacet));
  EXPECT_THROW(g.add_edge(link(EdgeKind::kBelongsTo, "ep:1", "fc:2")), GraphError);
  EXPECT_THROW(g.add_edge(link(EdgeKind::kBelongsTo, "fc:1", "fc:2")), GraphError);
}

TEST(MemoryGraph, CausalConfidenceFloor) {
  MemoryGraph g;
  g.add_node(make("ep:a", Layer::kEpisode, "2023-01-01"));
  g.add_node(make("ep:b", Layer::kEpisode, "2023-01-02"));
  EXPECT_THROW(g.add_edge(link(EdgeKind::kCausal, "ep:a", "ep:b", 0.69)), GraphError);
  EXPECT_NO_THROW(g.add_edge(link(EdgeKind::kCausal, "ep:a", "ep:b", kCausalConfidenceFloor)));
}

TEST(MemoryGraph, NeighborsByDirection) {
  MemoryGraph g = small_graph();
  const auto out = g.neighbors(NodeId{"fp:1"}, EdgeKind::kBelongsTo, Direction::kOut);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].node->id.value, "fc:1");
  const auto in = g.neighbors(NodeId{"fp:1"}, EdgeKind::kBelongsTo, Direction::kIn);
  ASSERT_EQ(in.size(), 1u);
  EXPECT_EQ(in[0].node->id.value, "en:1");
  EXPECT_EQ(g.neighbors(NodeId{"fp:1"}, EdgeKind::kBelongsTo, Direction::kBoth).size(), 2u);
  EXPECT_TRUE(g.neighbors(NodeId{"fp:1"}, EdgeKind::kTemporal, Direction::kBoth).empty());
  EXPECT_EQ(g.incident_edges(NodeId{"fp:1"}), (std::vector<EdgeId>{EdgeId{1}, EdgeId{2}}));
}

TEST(MemoryGraph, EpisodeOfClimbsHierarchy) {
  MemoryGraph g = small_graph();
  EXPECT_EQ(g.episode_of(NodeId{"en:1"}).value, "ep:1");
  EXPECT_EQ(g.episode_of(NodeId{"ep:1"}).value, "ep:1");
  g.add_node(make("fp:orphan", Layer::kFacetPoint));
  EXPECT_THROW(g.episode_of(NodeId{"fp:orphan"}), GraphError);
}

TEST(MemoryGraph, EpisodeChainOrderedByTimestamp) {
  MemoryGraph g;
  g.add_node(make("ep:late", Layer::kEpisode, "2023-05-01T00:00:00"));
  g.add_node(make("ep:early", Layer::kEpisode, "2023-01-01T00:00:00"));
  g.add_node(make("ep:mid", Layer::kEpisode, "2023-03-01T00:00:00"));
  ASSERT_EQ(g.episode_chain().size(), 3u);
  EXPECT_EQ(g.episode_chain()[0].value, "ep:early");
  EXPECT_EQ(g.episode_chain()[2].value, "ep:late");
  EXPECT_EQ(g.chain_position(NodeId{"ep:mid"}), 1u);
}

TEST(MemoryGraph, FindEdge) {
  MemoryGraph g = small_graph();
  EXPECT_EQ(g.find_edge(EdgeKind::kBelongsTo, NodeId{"fp:1"}, NodeId{"fc:1"}), EdgeId{1});
  EXPECT_FALSE(g.find_edge(EdgeKind::kBelongsTo, NodeId{"fc:1"}, NodeId{"fp:1"}));
}

TEST(MemoryGraph, NodeIdsAreContentDerived) {
  const NodeId a = make_node_id(Layer::kEpisode, "c", "Hello  world", "2023-01-01", "h1");
  const NodeId b = make_node_id(Layer::kEpisode, "c", "Hello world", "2023-01-01", "h1");
  const NodeId c = make_node_id(Layer::kEpisode, "c", "Hello world", "2023-01-01", "h2");
  EXPECT_EQ(a, b);
  EXPECT_NE(a, c);
  EXPECT_EQ(a.value.rfind("ep:", 0), 0u);
  EXPECT_EQ(a.value.size(), 3u + 16u);
}

TEST(MemoryGraph, LayerAndKindNamesRoundTrip) {
  for (Layer l : kAllLayers) EXPECT_EQ(parse_layer(to_string(l)), l);
  for (EdgeKind k : kAllEdgeKinds) EXPECT_EQ(parse_edge_kind(to_string(k)), k);
  EXPECT_FALSE(parse_edge_kind("bogus"));
}

TEST(Checkpoint, JsonRoundTrip) {
  const Memory m = strata::testing::random_memory(5);
  // Ingested hashes live in their own file.
  MemoryGraph back = graph_from_json(graph_to_json(m.graph));
  for (const auto& h : m.graph.ingested_hashes()) back.record_hash(h);
  EXPECT_EQ(back, m.graph);
}

TEST(Checkpoint, SaveLoadRoundTrip) {
  TempDir dir;
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    Memory m = strata::testing::random_memory(seed);
    m.embedder_identity = "hash/test";
    m.chunks["abc"] = ChunkRecord{"c", "2023-01-01T00:00:00", "text", {"D1:1", "D1:2"}};
    save_checkpoint(m, dir.path());
    const Memory loaded = load_checkpoint(dir.path(), "hash/test");
    EXPECT_EQ(loaded.graph, m.graph);
    EXPECT_EQ(loaded.stores, m.stores);
    EXPECT_EQ(loaded.chunks, m.chunks);
    EXPECT_EQ(loaded.embedder_identity, m.embedder_identity);
  }
}

TEST(Checkpoint, EmbedderMismatchOnlyWarns) {
  TempDir dir;
  const Memory m = strata::testing::random_memory(4);
  save_checkpoint(m, dir.path());
  EXPECT_NO_THROW(load_checkpoint(dir.path(), "some-other-embedder"));
}

TEST(Checkpoint, TruncatedVectorFileIsRejected) {
  TempDir dir;
  save_checkpoint(strata::testing::random_memory(7), dir.path());
  const fs::path f = dir.path() / "vectors" / "episode.f32";
  fs::resize_file(f, fs::file_size(f) - 3);
  EXPECT_THROW(load_checkpoint(dir.path()), CheckpointError);
}

TEST(Checkpoint, RowCountMismatchIsRejected) {
  TempDir dir;
  const Memory m = strata::testing::random_memory(8);
  save_checkpoint(m, dir.path());
  const fs::path f = dir.path() / "vectors" / "episode.f32";
  fs::resize_file(f, fs::file_size(f) - m.stores.dimension() * 4);
  EXPECT_THROW(load_checkpoint(dir.path()), CheckpointError);
}

TEST(Checkpoint, SchemaMismatchIsRejected) {
  TempDir dir;
  save_checkpoint(strata::testing::random_memory(9), dir.path());
  const fs::path f = dir.path() / "graph.json";
  std::ifstream in(f);
  nlohmann::json doc = nlohmann::json::parse(in);
  in.close();
  doc["schema_version"] = 999;
  std::ofstream(f) << doc.dump();
  EXPECT_THROW(load_checkpoint(dir.path()), CheckpointError);
}

TEST(Checkpoint, MissingDirectoryIsRejected) {
  EXPECT_THROW(load_checkpoint("/nonexistent/strata/ckpt"), CheckpointError);
}
