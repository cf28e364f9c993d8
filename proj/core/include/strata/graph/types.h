#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>

namespace strata::graph {

// Node layers, from finest to coarsest granularity.
enum class Layer : std::uint8_t { kEntity, kFacetPoint, kFacet, kEpisode };

inline constexpr std::array<Layer, 4> kAllLayers{Layer::kEntity, Layer::kFacetPoint, Layer::kFacet, Layer::kEpisode};

// BelongsTo is the only hierarchical kind; the rest are relation kinds.
enum class EdgeKind : std::uint8_t { kBelongsTo, kSemantic, kTemporal, kCausal, kEvolution, kInvolvesEntity };

inline constexpr std::array<EdgeKind, 6> kAllEdgeKinds{EdgeKind::kBelongsTo, EdgeKind::kSemantic,
                                                        EdgeKind::kTemporal,  EdgeKind::kCausal,
                                                        EdgeKind::kEvolution, EdgeKind::kInvolvesEntity};

enum class Direction : std::uint8_t { kOut, kIn, kBoth };

// Causal edges below this confidence are never written.
inline constexpr double kCausalConfidenceFloor = 0.7;

inline constexpr bool is_relation(EdgeKind k) { return k != EdgeKind::kBelongsTo; }

std::string_view to_string(Layer layer);
std::string_view to_string(EdgeKind kind);
std::optional<Layer> parse_layer(std::string_view s);
std::optional<EdgeKind> parse_edge_kind(std::string_view s);

struct NodeId {
  std::string value;

  friend auto operator<=>(const NodeId&, const NodeId&) = default;
};

struct EdgeId {
  std::uint64_t value = 0;

  friend auto operator<=>(const EdgeId&, const EdgeId&) = default;
};

struct Node {
  NodeId id;
  Layer layer = Layer::kEpisode;
  // Summary (Episode), theme (Facet), fact (FacetPoint) or name (Entity).
  std::string text;
  // Row in the layer's vector store.
  std::optional<std::uint32_t> embedding_ref;
  // ISO-8601; required on Episodes.
  std::optional<std::string> timestamp;
  // Entities only: person/organization/place/concept/event/other.
  std::optional<std::string> entity_type;
  std::string conversation_id;
  // Episodes only: content hash of the source chunk.
  std::optional<std::string> chunk_hash;

  friend bool operator==(const Node&, const Node&) = default;
};

struct Edge {
  EdgeId id;
  EdgeKind kind = EdgeKind::kBelongsTo;
  NodeId src;
  NodeId dst;
  std::optional<std::string> description;
  // Row in edge_relation (or edge_semantic for Semantic edges). Never set on BelongsTo.
  std::optional<std::uint32_t> embedding_ref;
  // Causal only.
  std::optional<double> confidence;

  friend bool operator==(const Edge&, const Edge&) = default;
};

// Owner string recorded in edge vector stores for an edge.
inline std::string edge_owner(EdgeId id) { return "edge:" + std::to_string(id.value); }

// Deterministic content-derived node id: "<layer prefix>:<16 hex of SHA-256>"
// over layer, conversation, normalised text, timestamp and an optional
// discriminator (owning episode for FacetPoints/Facets, chunk hash for Episodes).
NodeId make_node_id(Layer layer, std::string_view conversation_id, std::string_view text,
                    std::string_view timestamp, std::string_view discriminator = {});

}  // namespace strata::graph

template <>
struct std::hash<strata::graph::NodeId> {
  std::size_t operator()(const strata::graph::NodeId& id) const noexcept { return std::hash<std::string>{}(id.value); }
};

template <>
struct std::hash<strata::graph::EdgeId> {
  std::size_t operator()(const strata::graph::EdgeId& id) const noexcept {
    return std::hash<std::uint64_t>{}(id.value);
  }
};
