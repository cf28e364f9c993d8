#include "strata/retrieval/bundle_search.h"

#include <algorithm>
#include <map>

#include <nlohmann/json.hpp>

#include "strata/common/error.h"

namespace strata::retrieval {

using graph::EdgeKind;
using graph::Layer;
using graph::NodeId;
using nlohmann::json;

namespace {

constexpr std::array<PathTemplate, 8> kTemplates{{
    {TemplateId::kEp, TemplateFamily::kBackbone, "Ep"},
    {TemplateId::kFcEp, TemplateFamily::kBackbone, "Fc->Ep"},
    {TemplateId::kFpFcEp, TemplateFamily::kBackbone, "FP->Fc->Ep"},
    {TemplateId::kEnFpFcEp, TemplateFamily::kBackbone, "En->FP->Fc->Ep"},
    {TemplateId::kEnFcEp, TemplateFamily::kBackbone, "En->Fc->Ep"},
    {TemplateId::kTemporalBridge, TemplateFamily::kRelationBridge, "a-temporal->v->Ep"},
    {TemplateId::kCausalBridge, TemplateFamily::kRelationBridge, "a-causal->v->Ep"},
    {TemplateId::kEvolutionBridge, TemplateFamily::kRelationBridge, "a-evolution->v->Ep"},
}};

bool is_bridge_kind(EdgeKind k) {
  return k == EdgeKind::kTemporal || k == EdgeKind::kCausal || k == EdgeKind::kEvolution;
}

TemplateId bridge_template(EdgeKind k) {
  switch (k) {
    case EdgeKind::kTemporal: return TemplateId::kTemporalBridge;
    case EdgeKind::kCausal: return TemplateId::kCausalBridge;
    default: return TemplateId::kEvolutionBridge;
  }
}

// Backbone template matching a climb that starts on `start` and visits
// `layers` (anchor layer excluded).
std::optional<TemplateId> backbone_template(Layer start, const std::vector<Layer>& layers) {
  using L = Layer;
  if (start == L::kEpisode && layers.empty()) return TemplateId::kEp;
  if (start == L::kFacet && layers == std::vector{L::kEpisode}) return TemplateId::kFcEp;
  if (start == L::kFacetPoint && layers == std::vector{L::kFacet, L::kEpisode}) return TemplateId::kFpFcEp;
  if (start == L::kEntity && layers == std::vector{L::kFacetPoint, L::kFacet, L::kEpisode}) return TemplateId::kEnFpFcEp;
  if (start == L::kEntity && layers == std::vector{L::kFacet, L::kEpisode}) return TemplateId::kEnFcEp;
  return std::nullopt;
}

struct Enumerator {
  const graph::MemoryGraph& graph;
  const EdgeCostModel& model;
  std::size_t max_hops;
  std::vector<PathInstance>& out;

  // Follows BelongsTo upward from the last node of `path` and emits a copy
  // at every Episode reached.
  void climb(PathInstance& path, const NodeId& at, std::optional<TemplateId> fixed) {
    const graph::Node& node = graph.node(at);
    if (node.layer == Layer::kEpisode) {
      if (fixed) {
        emit(path, at, *fixed);
      } else {
        std::vector<Layer> layers;
        for (const Hop& h : path.hops) layers.push_back(graph.node(h.node).layer);
        if (auto t = backbone_template(path.anchor.layer, layers)) emit(path, at, *t);
      }
      return;
    }
    if (path.hops.size() >= max_hops) return;
    for (const graph::Neighbor& n : graph.neighbors(at, EdgeKind::kBelongsTo, graph::Direction::kOut)) {
      path.hops.push_back(Hop{n.edge->id, EdgeKind::kBelongsTo, n.node->id, true, model.cost(*n.edge),
                              model.params().c_hop});
      climb(path, n.node->id, fixed);
      path.hops.pop_back();
    }
  }

  void emit(const PathInstance& path, const NodeId& episode, TemplateId id) {
    PathInstance p = path;
    p.template_id = id;
    p.episode = episode;
    p.total_cost = p.anchor.cost;
    for (const Hop& h : p.hops) p.total_cost += h.edge_cost + h.hop_penalty;
    out.push_back(std::move(p));
  }
};

bool path_less(const PathInstance& a, const PathInstance& b) {
  if (a.total_cost != b.total_cost) return a.total_cost < b.total_cost;
  if (a.hops.size() != b.hops.size()) return a.hops.size() < b.hops.size();
  if (a.anchor.id != b.anchor.id) return a.anchor.id < b.anchor.id;
  for (std::size_t i = 0; i < a.hops.size(); ++i) {
    if (a.hops[i].edge != b.hops[i].edge) return a.hops[i].edge < b.hops[i].edge;
  }
  return false;
}

}  // namespace

const std::array<PathTemplate, 8>& path_templates() { return kTemplates; }

std::string_view to_string(TemplateId id) { return kTemplates[static_cast<std::size_t>(id)].name; }

TemplateFamily family_of(TemplateId id) { return kTemplates[static_cast<std::size_t>(id)].family; }

std::vector<Anchor> discover_anchors(const graph::MemoryGraph& graph, const index::VectorStores& stores,
                                     std::span<const float> query, std::size_t k_per_layer) {
  if (k_per_layer == 0) throw InputError("k_per_layer must be at least 1");
  std::map<NodeId, Anchor> best;
  for (Layer layer : graph::kAllLayers) {
    for (const index::SearchHit& hit : stores[index::store_for(layer)].top_k(query, k_per_layer)) {
      const graph::Node* node = graph.find_node(NodeId{hit.owner});
      if (!node) continue;
      Anchor a{node->id, node->layer, hit.distance, hit.similarity};
      auto [it, inserted] = best.emplace(a.id, a);
      if (!inserted && a.cost < it->second.cost) it->second = a;
    }
  }
  std::vector<Anchor> anchors;
  anchors.reserve(best.size());
  for (auto& [id, a] : best) anchors.push_back(std::move(a));
  std::stable_sort(anchors.begin(), anchors.end(), [](const Anchor& a, const Anchor& b) { return a.cost < b.cost; });
  return anchors;
}

std::unordered_set<graph::EdgeId> recall_set(const graph::MemoryGraph& graph, std::span<const Anchor> anchors) {
  std::unordered_set<graph::EdgeId> recall;
  for (const Anchor& a : anchors) {
    for (graph::EdgeId e : graph.incident_edges(a.id)) recall.insert(e);
  }
  return recall;
}

std::vector<PathInstance> enumerate_paths(const graph::MemoryGraph& graph, std::span<const Anchor> anchors,
                                          const EdgeCostModel& model, bool enable_bridges, std::size_t max_hops) {
  std::vector<PathInstance> out;
  Enumerator en{graph, model, max_hops, out};
  for (const Anchor& a : anchors) {
    PathInstance path;
    path.anchor = a;
    en.climb(path, a.id, std::nullopt);
    if (!enable_bridges || max_hops == 0) continue;
    for (graph::EdgeId id : graph.incident_edges(a.id)) {
      const graph::Edge& e = graph.edge(id);
      if (!is_bridge_kind(e.kind)) continue;
      const bool forward = e.src == a.id;
      const NodeId& landing = forward ? e.dst : e.src;
      path.hops.push_back(Hop{e.id, e.kind, landing, forward, model.cost(e), model.params().c_hop});
      en.climb(path, landing, bridge_template(e.kind));
      path.hops.pop_back();
    }
  }
  return out;
}

Bundle assemble_bundle(const graph::MemoryGraph& graph, std::span<const PathInstance> paths, std::size_t k) {
  std::map<NodeId, const PathInstance*> winner;
  for (const PathInstance& p : paths) {
    auto [it, inserted] = winner.emplace(p.episode, &p);
    if (!inserted && path_less(p, *it->second)) it->second = &p;
  }
  Bundle bundle;
  bundle.reserve(winner.size());
  for (const auto& [episode, p] : winner) bundle.push_back(BundleEntry{episode, p->total_cost, *p});
  std::sort(bundle.begin(), bundle.end(), [&](const BundleEntry& a, const BundleEntry& b) {
    if (a.score != b.score) return a.score < b.score;
    const auto pa = graph.chain_position(a.episode);
    const auto pb = graph.chain_position(b.episode);
    if (pa != pb) return pa < pb;
    return a.episode < b.episode;
  });
  if (bundle.size() > k) bundle.resize(k);
  return bundle;
}

RetrievalResult retrieve(const graph::Memory& memory, std::span<const float> query, routing::IntentSet intents,
                         const RetrievalConfig& config) {
  RetrievalResult r;
  r.intents = intents;
  r.anchors = discover_anchors(memory.graph, memory.stores, query, config.k_per_layer);
  const auto recall = recall_set(memory.graph, r.anchors);
  r.recall_size = recall.size();
  const EdgeCostModel model(intents, &recall, &memory.stores, query, config.cost, config.enable_intent_costs);
  const auto paths = enumerate_paths(memory.graph, r.anchors, model, config.enable_bridges, config.max_hops);
  r.paths_enumerated = paths.size();
  r.bundle = assemble_bundle(memory.graph, paths, config.bundle_size);
  return r;
}

json to_json(const PathInstance& path) {
  json hops = json::array();
  for (const Hop& h : path.hops) {
    hops.push_back({{"edge", h.edge.value},
                    {"kind", graph::to_string(h.kind)},
                    {"node", h.node.value},
                    {"direction", h.forward ? "out" : "in"},
                    {"edge_cost", h.edge_cost},
                    {"hop_penalty", h.hop_penalty}});
  }
  return json{{"template", to_string(path.template_id)},
              {"anchor", path.anchor.id.value},
              {"anchor_layer", graph::to_string(path.anchor.layer)},
              {"anchor_cost", path.anchor.cost},
              {"hops", std::move(hops)},
              {"episode", path.episode.value},
              {"total_cost", path.total_cost}};
}

json RetrievalResult::trace() const {
  json anchor_list = json::array();
  for (const Anchor& a : anchors) {
    anchor_list.push_back({{"id", a.id.value}, {"layer", graph::to_string(a.layer)}, {"cost", a.cost}});
  }
  json entries = json::array();
  for (const BundleEntry& e : bundle) {
    entries.push_back({{"episode", e.episode.value}, {"score", e.score}, {"path", to_json(e.path)}});
  }
  return json{{"intents", intents.to_string()},
              {"anchors", std::move(anchor_list)},
              {"recall_size", recall_size},
              {"paths_enumerated", paths_enumerated},
              {"bundle", std::move(entries)}};
}

}  // namespace strata::retrieval
