#pragma once

#include <cstddef>
#include <deque>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "strata/graph/checkpoint.h"
#include "strata/index/embedder.h"
#include "strata/ingest/conversation.h"
#include "strata/ingest/extraction.h"

namespace strata::llm {
class ChatClient;
}

namespace strata::ingest {

struct IngestConfig {
  double entity_merge_threshold = 0.90;
  double facet_merge_threshold = 0.85;
  std::size_t causal_interval = 5;  // fresh chunks between causal passes
  std::size_t causal_window = 5;    // episode summaries shown per pass
  std::size_t temporal_window = 5;  // trailing episodes whose FacetPoints are paired
  bool link_episode_chain = true;   // Temporal edge between chain neighbours
  bool causal_consolidation = true;
  // Semantic edges stay off unless a threshold is set.
  std::optional<double> semantic_threshold;
};

enum class DedupStatus { kFresh, kDuplicate };

struct CausalPair {
  graph::NodeId cause;
  graph::NodeId effect;
  std::string description;
  double confidence = 0.0;
};

struct IngestReport {
  std::size_t fresh = 0;
  std::size_t duplicate = 0;
  std::size_t failed = 0;
  std::size_t fallback = 0;
  std::size_t causal_passes = 0;  // passes triggered, including failed ones
  std::size_t causal_failures = 0;
  std::size_t causal_edges = 0;
  std::map<std::string, std::size_t> edges_by_kind;
  std::vector<std::string> failures;

  nlohmann::json to_json() const;
};

// Writes chunks into a Memory. One instance per ingestion run; the Memory
// must not be touched by anyone else while it is alive.
class Ingestor {
 public:
  Ingestor(graph::Memory& memory, index::Embedder& embedder, Extractor& extractor, llm::ChatClient* causal_client,
           IngestConfig config = {});

  DedupStatus dedup_check(const RawChunk& chunk) const;

  // Exact (normalised) name match first, then cosine above the entity
  // threshold against Entities of the same conversation; otherwise a new node.
  graph::NodeId merge_entity(const std::string& conversation_id, std::string_view name, std::string_view entity_type,
                             const index::Embedding& embedding);

  // Cosine above the facet threshold against Facets of `episode` only.
  graph::NodeId merge_facet(const graph::NodeId& episode, std::string_view theme, const index::Embedding& embedding);

  graph::NodeId build_chunk_subgraph(const RawChunk& chunk, const ExtractionResult& result);

  // One pass over the most recent episode summaries. Throws on backend or
  // parse failure; accepted pairs are already written when it returns.
  std::vector<CausalPair> consolidate_causal();

  // Dedup, extract (with fallback), build, and fire a causal pass when due.
  void ingest_chunk(const RawChunk& chunk);
  // Final causal flush when anything is pending.
  void finish();

  // ingest_chunk over every chunk, then finish().
  IngestReport ingest(std::span<const RawChunk> chunks);

  const IngestReport& report() const { return report_; }
  std::size_t pending_causal() const { return pending_causal_; }

 private:
  struct Timed {
    graph::NodeId id;
    std::int64_t time = 0;
    std::size_t order = 0;
  };

  std::uint32_t add_row(index::StoreName store, const index::Embedding& v, std::string owner);
  graph::NodeId add_embedded_node(graph::Node node, const index::Embedding& v);
  std::optional<graph::EdgeId> add_relation(graph::EdgeKind kind, const graph::NodeId& src, const graph::NodeId& dst,
                                            std::string description, std::optional<double> confidence = {});
  void add_belongs_to(const graph::NodeId& src, const graph::NodeId& dst);
  std::optional<std::string> resolve_timestamp(const ExtractedFacetPoint& fp, const ExtractionResult& result) const;
  std::int64_t effective_time(const graph::NodeId& facet_point) const;
  void run_causal_pass();
  void tally_edges(std::size_t from);

  graph::Memory& memory_;
  index::Embedder& embedder_;
  Extractor& extractor_;
  FallbackExtractor fallback_;
  llm::ChatClient* causal_client_;
  IngestConfig config_;

  std::map<std::pair<std::string, std::string>, graph::NodeId> entity_by_name_;
  std::deque<graph::NodeId> recent_episodes_;
  std::map<graph::NodeId, std::vector<graph::NodeId>> episode_points_;
  std::size_t pending_causal_ = 0;
  IngestReport report_;
};

}  // namespace strata::ingest
