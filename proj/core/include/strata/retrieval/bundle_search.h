#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <string_view>
#include <unordered_set>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "strata/graph/checkpoint.h"
#include "strata/retrieval/edge_cost.h"

namespace strata::retrieval {

struct Anchor {
  graph::NodeId id;
  graph::Layer layer = graph::Layer::kEpisode;
  double cost = 0.0;  // 1 - cosine
  double similarity = 0.0;
};

enum class TemplateId : std::uint8_t {
  kEp,
  kFcEp,
  kFpFcEp,
  kEnFpFcEp,
  kEnFcEp,
  kTemporalBridge,
  kCausalBridge,
  kEvolutionBridge,
};

enum class TemplateFamily : std::uint8_t { kBackbone, kRelationBridge };

struct PathTemplate {
  TemplateId id;
  TemplateFamily family;
  std::string_view name;
};

// The five backbone and three bridge templates.
const std::array<PathTemplate, 8>& path_templates();
std::string_view to_string(TemplateId id);
TemplateFamily family_of(TemplateId id);

struct Hop {
  graph::EdgeId edge;
  graph::EdgeKind kind = graph::EdgeKind::kBelongsTo;
  graph::NodeId node;    // node reached by this hop
  bool forward = true;   // traversed src -> dst
  double edge_cost = 0.0;
  double hop_penalty = 0.0;
};

struct PathInstance {
  Anchor anchor;
  TemplateId template_id = TemplateId::kEp;
  std::vector<Hop> hops;
  graph::NodeId episode;
  double total_cost = 0.0;  // anchor cost, then += edge_cost + hop_penalty per hop
};

struct BundleEntry {
  graph::NodeId episode;
  double score = 0.0;
  PathInstance path;
};

using Bundle = std::vector<BundleEntry>;

struct RetrievalConfig {
  std::size_t k_per_layer = 30;
  std::size_t bundle_size = 10;
  bool enable_bridges = true;       // off: backbone templates only
  bool enable_intent_costs = true;  // off: alpha is 1 everywhere
  std::size_t max_hops = 4;
  CostParams cost;
};

struct RetrievalResult {
  routing::IntentSet intents;
  std::vector<Anchor> anchors;
  std::size_t recall_size = 0;
  std::size_t paths_enumerated = 0;
  Bundle bundle;

  nlohmann::json trace() const;
};

// Top-k per node layer, merged and deduplicated by node id (lowest cost
// kept). Ordered by cost, then id.
std::vector<Anchor> discover_anchors(const graph::MemoryGraph& graph, const index::VectorStores& stores,
                                     std::span<const float> query, std::size_t k_per_layer);

// Every edge with an anchor as an endpoint.
std::unordered_set<graph::EdgeId> recall_set(const graph::MemoryGraph& graph, std::span<const Anchor> anchors);

// All template instances from every anchor. Backbone paths climb BelongsTo
// edges to an Episode. Bridge paths first cross one Temporal, Causal or
// Evolution edge touching the anchor (either direction) and then climb.
std::vector<PathInstance> enumerate_paths(const graph::MemoryGraph& graph, std::span<const Anchor> anchors,
                                          const EdgeCostModel& model, bool enable_bridges, std::size_t max_hops = 4);

// Per-episode minimum, ascending, ties by chain position then id; top K.
Bundle assemble_bundle(const graph::MemoryGraph& graph, std::span<const PathInstance> paths, std::size_t k);

RetrievalResult retrieve(const graph::Memory& memory, std::span<const float> query, routing::IntentSet intents,
                         const RetrievalConfig& config);

nlohmann::json to_json(const PathInstance& path);

}  // namespace strata::retrieval
