#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "strata/graph/types.h"

namespace strata::graph {

struct Neighbor {
  const Edge* edge = nullptr;
  const Node* node = nullptr;
};

// Typed multigraph of Entity/FacetPoint/Facet/Episode nodes.
//
// Writes are append-only: nodes and edges are never removed. The class does no
// internal locking; one writer at a time, and const access from any number of
// threads once the writer is done. Pointers returned by accessors stay valid
// only until the next mutation.
class MemoryGraph {
 public:
  static constexpr int kSchemaVersion = 1;

  // Throws GraphError on duplicate id, missing Episode timestamp, or an
  // entity_type that is present off the Entity layer (or absent on it).
  NodeId add_node(Node node);

  // Assigns the next sequential edge id (the incoming id is ignored).
  // Throws GraphError on dangling endpoints, self loops, BelongsTo layer-order
  // violations, causal confidence below the floor, or a duplicate
  // (kind, src, dst) triple.
  EdgeId add_edge(Edge edge);

  bool contains(const NodeId& id) const { return node_index_.contains(id); }
  const Node* find_node(const NodeId& id) const;
  const Node& node(const NodeId& id) const;
  const Edge& edge(EdgeId id) const;

  std::span<const Node> nodes() const { return nodes_; }
  std::span<const Edge> edges() const { return edges_; }
  std::size_t node_count() const { return nodes_.size(); }
  std::size_t edge_count() const { return edges_.size(); }

  // Ordered by edge id; Direction::kBoth merges out- and in-edges.
  std::vector<Neighbor> neighbors(const NodeId& id, EdgeKind kind, Direction direction) const;

  // All edge ids touching `id`, in either direction, ascending.
  std::vector<EdgeId> incident_edges(const NodeId& id) const;

  std::optional<EdgeId> find_edge(EdgeKind kind, const NodeId& src, const NodeId& dst) const;

  // Unique Episode reachable over BelongsTo (identity on Episodes). Throws
  // GraphError for orphans and for nodes spanning several Episodes.
  NodeId episode_of(const NodeId& id) const;

  const std::vector<NodeId>& episode_chain() const { return chain_; }
  std::size_t chain_position(const NodeId& episode) const;

  const std::set<std::string>& ingested_hashes() const { return hashes_; }
  bool has_hash(const std::string& hash) const { return hashes_.contains(hash); }
  void record_hash(std::string hash) { hashes_.insert(std::move(hash)); }

  // Structural equality over nodes, edges, chain and hashes (adjacency is derived).
  friend bool operator==(const MemoryGraph& a, const MemoryGraph& b) {
    return a.nodes_ == b.nodes_ && a.edges_ == b.edges_ && a.chain_ == b.chain_ && a.hashes_ == b.hashes_;
  }

 private:
  struct EdgeKey {
    EdgeKind kind;
    std::size_t src;
    std::size_t dst;
    friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
  };
  struct EdgeKeyHash {
    std::size_t operator()(const EdgeKey& k) const noexcept {
      return (k.src * 1000003u) ^ (k.dst * 9176u) ^ static_cast<std::size_t>(k.kind);
    }
  };

  std::size_t index_of(const NodeId& id) const;
  void validate_belongs_to(const Node& src, const Node& dst) const;
  std::optional<NodeId> parent_episode_of_facet(std::size_t facet_index) const;

  std::vector<Node> nodes_;
  std::unordered_map<NodeId, std::size_t> node_index_;
  std::vector<Edge> edges_;
  std::vector<std::vector<std::uint64_t>> out_;
  std::vector<std::vector<std::uint64_t>> in_;
  std::unordered_set<EdgeKey, EdgeKeyHash> edge_keys_;
  std::vector<NodeId> chain_;
  std::vector<std::int64_t> chain_begin_;
  std::unordered_map<NodeId, std::size_t> chain_pos_;
  std::set<std::string> hashes_;
};

}  // namespace strata::graph
