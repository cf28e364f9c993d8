#include "strata/graph/memory_graph.h"

#include <algorithm>

#include "strata/common/error.h"
#include "strata/common/hash.h"
#include "strata/common/text.h"
#include "strata/common/time.h"

namespace strata::graph {

std::string_view to_string(Layer layer) {
  switch (layer) {
    case Layer::kEntity: return "entity";
    case Layer::kFacetPoint: return "facet_point";
    case Layer::kFacet: return "facet";
    case Layer::kEpisode: return "episode";
  }
  return "unknown";
}

std::string_view to_string(EdgeKind kind) {
  switch (kind) {
    case EdgeKind::kBelongsTo: return "belongs_to";
    case EdgeKind::kSemantic: return "semantic";
    case EdgeKind::kTemporal: return "temporal";
    case EdgeKind::kCausal: return "causal";
    case EdgeKind::kEvolution: return "evolution";
    case EdgeKind::kInvolvesEntity: return "involves_entity";
  }
  return "unknown";
}

std::optional<Layer> parse_layer(std::string_view s) {
  for (Layer l : kAllLayers) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

std::optional<EdgeKind> parse_edge_kind(std::string_view s) {
  for (EdgeKind k : kAllEdgeKinds) {
    if (to_string(k) == s) return k;
  }
  return std::nullopt;
}

NodeId make_node_id(Layer layer, std::string_view conversation_id, std::string_view text,
                    std::string_view timestamp, std::string_view discriminator) {
  static constexpr std::array<std::string_view, 4> kPrefix{"en", "fp", "fc", "ep"};
  std::string material;
  material.append(to_string(layer));
  material.push_back('\x1f');
  material.append(conversation_id);
  material.push_back('\x1f');
  material.append(text::normalize_name(text));
  material.push_back('\x1f');
  material.append(timestamp);
  material.push_back('\x1f');
  material.append(discriminator);
  const std::string digest = sha256_hex(material);
  return NodeId{std::string(kPrefix[static_cast<std::size_t>(layer)]) + ":" + digest.substr(0, 16)};
}

std::size_t MemoryGraph::index_of(const NodeId& id) const {
  auto it = node_index_.find(id);
  if (it == node_index_.end()) throw GraphError("unknown node id '" + id.value + "'");
  return it->second;
}

const Node* MemoryGraph::find_node(const NodeId& id) const {
  auto it = node_index_.find(id);
  return it == node_index_.end() ? nullptr : &nodes_[it->second];
}

const Node& MemoryGraph::node(const NodeId& id) const { return nodes_[index_of(id)]; }

const Edge& MemoryGraph::edge(EdgeId id) const {
  if (id.value >= edges_.size()) throw GraphError("unknown edge id " + std::to_string(id.value));
  return edges_[id.value];
}

NodeId MemoryGraph::add_node(Node node) {
  if (node.id.value.empty()) throw GraphError("node id must be nonempty");
  if (contains(node.id)) throw GraphError("duplicate node id '" + node.id.value + "'");
  if ((node.layer == Layer::kEntity) != node.entity_type.has_value()) {
    throw GraphError("entity_type must be present exactly on Entity nodes ('" + node.id.value + "')");
  }
  std::optional<TimeSpan> span;
  if (node.timestamp) {
    span = parse_iso8601(*node.timestamp);
    if (!span) throw GraphError("node '" + node.id.value + "' has a non ISO-8601 timestamp '" + *node.timestamp + "'");
  }
  if (node.layer == Layer::kEpisode && !span) {
    throw GraphError("Episode '" + node.id.value + "' requires a timestamp");
  }

  const std::size_t index = nodes_.size();
  node_index_.emplace(node.id, index);
  out_.emplace_back();
  in_.emplace_back();
  NodeId id = node.id;

  if (node.layer == Layer::kEpisode) {
    // Stable: after every episode whose timestamp is <= the new one.
    auto pos = std::upper_bound(chain_begin_.begin(), chain_begin_.end(), span->begin);
    const auto offset = static_cast<std::size_t>(pos - chain_begin_.begin());
    chain_begin_.insert(pos, span->begin);
    chain_.insert(chain_.begin() + static_cast<std::ptrdiff_t>(offset), id);
    for (std::size_t i = offset; i < chain_.size(); ++i) chain_pos_[chain_[i]] = i;
  }
  nodes_.push_back(std::move(node));
  return id;
}

std::optional<NodeId> MemoryGraph::parent_episode_of_facet(std::size_t facet_index) const {
  for (std::uint64_t e : out_[facet_index]) {
    const Edge& edge = edges_[e];
    if (edge.kind == EdgeKind::kBelongsTo && nodes_[index_of(edge.dst)].layer == Layer::kEpisode) return edge.dst;
  }
  return std::nullopt;
}

void MemoryGraph::validate_belongs_to(const Node& src, const Node& dst) const {
  const bool allowed = (src.layer == Layer::kEntity && dst.layer == Layer::kFacetPoint) ||
                       (src.layer == Layer::kEntity && dst.layer == Layer::kFacet) ||
                       (src.layer == Layer::kFacetPoint && dst.layer == Layer::kFacet) ||
                       (src.layer == Layer::kFacet && dst.layer == Layer::kEpisode);
  if (!allowed) {
    throw GraphError("belongs_to " + std::string(to_string(src.layer)) + " -> " + std::string(to_string(dst.layer)) +
                     " violates layer order");
  }
  const std::size_t src_index = index_of(src.id);
  if (src.layer == Layer::kFacet && parent_episode_of_facet(src_index)) {
    throw GraphError("Facet '" + src.id.value + "' already belongs to an Episode");
  }
  if (src.layer == Layer::kFacetPoint) {
    // Every facet of a FacetPoint must live in the same Episode.
    const auto target = parent_episode_of_facet(index_of(dst.id));
    if (!target) return;
    for (std::uint64_t e : out_[src_index]) {
      const Edge& existing = edges_[e];
      if (existing.kind != EdgeKind::kBelongsTo) continue;
      const auto other = parent_episode_of_facet(index_of(existing.dst));
      if (other && *other != *target) {
        throw GraphError("FacetPoint '" + src.id.value + "' would belong to two Episodes");
      }
    }
  }
}

EdgeId MemoryGraph::add_edge(Edge edge) {
  const std::size_t src = index_of(edge.src);
  const std::size_t dst = index_of(edge.dst);
  if (src == dst) throw GraphError("self loop on '" + edge.src.value + "'");

  if (edge.kind == EdgeKind::kBelongsTo) {
    if (edge.embedding_ref) throw GraphError("belongs_to edges carry no embedding");
    validate_belongs_to(nodes_[src], nodes_[dst]);
  }
  if (edge.kind == EdgeKind::kCausal) {
    if (!edge.confidence || *edge.confidence < kCausalConfidenceFloor || *edge.confidence > 1.0) {
      throw GraphError("causal edge confidence must lie in [0.7, 1]");
    }
  } else if (edge.confidence) {
    throw GraphError("only causal edges carry a confidence");
  }

  const EdgeKey key{edge.kind, src, dst};
  if (edge_keys_.contains(key)) {
    throw GraphError("duplicate " + std::string(to_string(edge.kind)) + " edge " + edge.src.value + " -> " +
                     edge.dst.value);
  }

  edge.id = EdgeId{edges_.size()};
  edge_keys_.insert(key);
  out_[src].push_back(edge.id.value);
  in_[dst].push_back(edge.id.value);
  edges_.push_back(std::move(edge));
  return edges_.back().id;
}

std::vector<Neighbor> MemoryGraph::neighbors(const NodeId& id, EdgeKind kind, Direction direction) const {
  const std::size_t index = index_of(id);
  std::vector<std::uint64_t> ids;
  if (direction != Direction::kIn) ids.insert(ids.end(), out_[index].begin(), out_[index].end());
  if (direction != Direction::kOut) ids.insert(ids.end(), in_[index].begin(), in_[index].end());
  if (direction == Direction::kBoth) std::sort(ids.begin(), ids.end());

  std::vector<Neighbor> result;
  for (std::uint64_t e : ids) {
    const Edge& edge = edges_[e];
    if (edge.kind != kind) continue;
    const NodeId& other = edge.src == id ? edge.dst : edge.src;
    result.push_back(Neighbor{&edge, &nodes_[index_of(other)]});
  }
  return result;
}

std::vector<EdgeId> MemoryGraph::incident_edges(const NodeId& id) const {
  const std::size_t index = index_of(id);
  std::vector<EdgeId> result;
  result.reserve(out_[index].size() + in_[index].size());
  for (std::uint64_t e : out_[index]) result.push_back(EdgeId{e});
  for (std::uint64_t e : in_[index]) result.push_back(EdgeId{e});
  std::sort(result.begin(), result.end());
  return result;
}

std::optional<EdgeId> MemoryGraph::find_edge(EdgeKind kind, const NodeId& src, const NodeId& dst) const {
  const auto s = node_index_.find(src);
  const auto d = node_index_.find(dst);
  if (s == node_index_.end() || d == node_index_.end()) return std::nullopt;
  if (!edge_keys_.contains(EdgeKey{kind, s->second, d->second})) return std::nullopt;
  for (std::uint64_t e : out_[s->second]) {
    if (edges_[e].kind == kind && edges_[e].dst == dst) return EdgeId{e};
  }
  return std::nullopt;
}

NodeId MemoryGraph::episode_of(const NodeId& id) const {
  const Node& start = node(id);
  if (start.layer == Layer::kEpisode) return start.id;

  std::set<NodeId> episodes;
  std::vector<std::size_t> frontier{index_of(id)};
  std::unordered_set<std::size_t> seen(frontier.begin(), frontier.end());
  while (!frontier.empty()) {
    const std::size_t current = frontier.back();
    frontier.pop_back();
    for (std::uint64_t e : out_[current]) {
      const Edge& edge = edges_[e];
      if (edge.kind != EdgeKind::kBelongsTo) continue;
      const std::size_t next = index_of(edge.dst);
      if (nodes_[next].layer == Layer::kEpisode) {
        episodes.insert(edge.dst);
      } else if (seen.insert(next).second) {
        frontier.push_back(next);
      }
    }
  }
  if (episodes.empty()) throw GraphError("node '" + id.value + "' has no belongs_to path to an Episode");
  if (episodes.size() > 1) throw GraphError("node '" + id.value + "' spans several Episodes");
  return *episodes.begin();
}

std::size_t MemoryGraph::chain_position(const NodeId& episode) const {
  auto it = chain_pos_.find(episode);
  if (it == chain_pos_.end()) throw GraphError("'" + episode.value + "' is not an Episode");
  return it->second;
}

}  // namespace strata::graph
