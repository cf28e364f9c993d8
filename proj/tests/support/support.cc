#include "support.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <set>

#include "strata/graph/memory_graph.h"
#include "strata/index/flat_store.h"

namespace strata::testing {

using graph::EdgeKind;
using graph::Layer;
using graph::NodeId;
using routing::IntentLabel;

std::vector<float> FixedEmbedder::embed_raw(std::string_view text) {
  auto it = vectors_.find(text);
  if (it != vectors_.end()) return it->second;
  return fallback_.embed_raw(text);
}

std::vector<float> random_unit(std::size_t dimension, std::mt19937_64& rng) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(dimension);
  double norm = 0.0;
  for (double& x : v) {
    x = gauss(rng);
    norm += x * x;
  }
  norm = std::sqrt(norm);
  std::vector<float> out(dimension);
  for (std::size_t i = 0; i < dimension; ++i) out[i] = static_cast<float>(v[i] / norm);
  return out;
}

std::vector<float> with_cosine(std::span<const float> q, double c, std::mt19937_64& rng) {
  // Gram-Schmidt a random direction against q, then mix.
  std::vector<float> r = random_unit(q.size(), rng);
  double proj = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) proj += static_cast<double>(r[i]) * q[i];
  std::vector<double> o(q.size());
  double norm = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    o[i] = r[i] - proj * q[i];
    norm += o[i] * o[i];
  }
  norm = std::sqrt(norm);
  const double s = std::sqrt(std::max(0.0, 1.0 - c * c));
  std::vector<float> out(q.size());
  for (std::size_t i = 0; i < q.size(); ++i) out[i] = static_cast<float>(c * q[i] + s * o[i] / norm);
  return out;
}

namespace {

std::string iso_day(int day) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "2023-03-%02dT10:00:00", day);
  return buf;
}

}  // namespace

graph::Memory random_memory(std::uint64_t seed, const RandomGraphOptions& options) {
  std::mt19937_64 rng(seed);
  auto uniform = [&](std::size_t lo, std::size_t hi) {
    return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
  };
  auto chance = [&](double p) { return std::bernoulli_distribution(p)(rng); };

  graph::Memory memory(options.dimension);
  auto& g = memory.graph;
  std::vector<std::vector<float>> vectors;

  auto embed_node = [&](graph::Node& n) {
    std::vector<float> v = !vectors.empty() && chance(options.duplicate_vector_rate)
                               ? vectors[uniform(0, vectors.size() - 1)]
                               : random_unit(options.dimension, rng);
    vectors.push_back(v);
    n.embedding_ref = memory.stores[index::store_for(n.layer)].add(v, n.id.value);
  };
  auto add = [&](Layer layer, const std::string& id, std::optional<std::string> ts = {}) {
    graph::Node n;
    n.id = NodeId{id};
    n.layer = layer;
    n.text = id;
    n.conversation_id = "c";
    n.timestamp = std::move(ts);
    if (layer == Layer::kEntity) n.entity_type = "other";
    if (layer == Layer::kEpisode) n.chunk_hash = id;
    embed_node(n);
    return g.add_node(std::move(n));
  };
  auto link = [&](EdgeKind kind, const NodeId& src, const NodeId& dst, bool embedded) {
    if (src == dst || g.find_edge(kind, src, dst)) return;
    graph::Edge e;
    e.kind = kind;
    e.src = src;
    e.dst = dst;
    if (kind == EdgeKind::kCausal) e.confidence = 0.7 + 0.3 * std::uniform_real_distribution<double>(0, 1)(rng);
    if (graph::is_relation(kind)) {
      e.description = src.value + " " + std::string(graph::to_string(kind)) + " " + dst.value;
      if (embedded) {
        // Edge ids are sequential, so the owner is known before insertion.
        const auto next = graph::EdgeId{g.edge_count()};
        e.embedding_ref = memory.stores[index::store_for(kind)].add(random_unit(options.dimension, rng),
                                                                     graph::edge_owner(next));
      }
    }
    g.add_edge(std::move(e));
  };

  const std::size_t target = uniform(std::min(options.min_nodes, options.max_nodes), options.max_nodes);
  std::vector<NodeId> episodes, facets, points, entities;
  std::map<NodeId, std::vector<NodeId>> facets_of;
  std::size_t made = 0;
  while (made < target) {
    const NodeId ep = add(Layer::kEpisode, "ep" + std::to_string(episodes.size()), iso_day(static_cast<int>(uniform(1, 9))));
    episodes.push_back(ep);
    ++made;
    const std::size_t nf = uniform(1, 3);
    for (std::size_t f = 0; f < nf && made < target; ++f) {
      const NodeId fc = add(Layer::kFacet, "fc" + std::to_string(facets.size()));
      facets.push_back(fc);
      facets_of[ep].push_back(fc);
      link(EdgeKind::kBelongsTo, fc, ep, false);
      ++made;
      const std::size_t np = uniform(0, 4);
      for (std::size_t p = 0; p < np && made < target; ++p) {
        const NodeId fp = add(Layer::kFacetPoint, "fp" + std::to_string(points.size()));
        points.push_back(fp);
        link(EdgeKind::kBelongsTo, fp, fc, false);
        // Occasionally a second facet of the same episode.
        if (facets_of[ep].size() > 1 && chance(0.2)) link(EdgeKind::kBelongsTo, fp, facets_of[ep].front(), false);
        ++made;
      }
    }
    if (made < target && chance(0.5)) {
      entities.push_back(add(Layer::kEntity, "en" + std::to_string(entities.size())));
      ++made;
    }
  }

  auto pick = [&](const std::vector<NodeId>& v) -> const NodeId& { return v[uniform(0, v.size() - 1)]; };
  for (const NodeId& en : entities) {
    const std::size_t links = uniform(0, 4);
    for (std::size_t i = 0; i < links; ++i) {
      if (!points.empty() && chance(0.6)) {
        link(EdgeKind::kBelongsTo, en, pick(points), false);
      } else {
        link(EdgeKind::kBelongsTo, en, pick(facets), false);
      }
    }
  }

  std::vector<NodeId> all;
  for (const graph::Node& n : g.nodes()) all.push_back(n.id);
  const std::size_t relations = uniform(all.size() / 2, all.size() * 2);
  constexpr std::array<EdgeKind, 5> kinds{EdgeKind::kSemantic, EdgeKind::kTemporal, EdgeKind::kCausal,
                                          EdgeKind::kEvolution, EdgeKind::kInvolvesEntity};
  for (std::size_t i = 0; i < relations; ++i) {
    const EdgeKind kind = kinds[uniform(0, kinds.size() - 1)];
    const bool embedded = chance(options.edge_embedding_rate);
    if (kind == EdgeKind::kCausal) {
      link(kind, pick(episodes), pick(episodes), embedded);
    } else if (kind == EdgeKind::kInvolvesEntity && !entities.empty() && !points.empty()) {
      link(kind, pick(points), pick(entities), embedded);
    } else {
      link(kind, pick(all), pick(all), embedded);
    }
  }
  for (const NodeId& ep : episodes) g.record_hash(ep.value);
  return memory;
}

double reference_edge_cost(EdgeKind kind, routing::IntentSet intents, bool in_recall, std::optional<double> cosine) {
  double base = 0.90;
  if (kind == EdgeKind::kBelongsTo) {
    base = 0.02;
  } else if (in_recall && cosine) {
    base = 1.0 - *cosine;
  }
  double a = 1.0;
  if (kind == EdgeKind::kTemporal && intents.contains(IntentLabel::kTemporal)) a = 0.5;
  if (kind == EdgeKind::kCausal && intents.contains(IntentLabel::kCausal)) a = 0.5;
  if (kind == EdgeKind::kEvolution && intents.contains(IntentLabel::kTemporal)) a = 0.7;
  return a * base;
}

std::vector<OracleEntry> oracle_bundle(const graph::Memory& memory, std::span<const float> query,
                                       routing::IntentSet intents, const OracleConfig& config) {
  const auto& g = memory.graph;
  auto cosine = [&](index::StoreName store, std::uint32_t row) {
    const auto v = memory.stores[store].row(row);
    double acc = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) acc += static_cast<double>(query[i]) * v[i];
    return acc;
  };

  // Anchors: per layer, every embedded node ranked by similarity then row.
  std::map<NodeId, double> anchor_cost;
  for (Layer layer : graph::kAllLayers) {
    std::vector<std::tuple<double, std::uint32_t, NodeId>> ranked;
    for (const graph::Node& n : g.nodes()) {
      if (n.layer != layer || !n.embedding_ref) continue;
      ranked.emplace_back(cosine(index::store_for(layer), *n.embedding_ref), *n.embedding_ref, n.id);
    }
    std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
      if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
      return std::get<1>(a) < std::get<1>(b);
    });
    for (std::size_t i = 0; i < ranked.size() && i < config.k_per_layer; ++i) {
      anchor_cost[std::get<2>(ranked[i])] = 1.0 - std::get<0>(ranked[i]);
    }
  }

  std::set<std::uint64_t> recall;
  for (const graph::Edge& e : g.edges()) {
    if (anchor_cost.contains(e.src) || anchor_cost.contains(e.dst)) recall.insert(e.id.value);
  }
  const routing::IntentSet effective = config.intent_costs ? intents : routing::IntentSet::general();
  auto cost = [&](const graph::Edge& e) {
    const bool in_recall = recall.contains(e.id.value);
    std::optional<double> cos;
    if (in_recall && e.embedding_ref) cos = cosine(index::store_for(e.kind), *e.embedding_ref);
    return reference_edge_cost(e.kind, effective, in_recall, cos);
  };

  // Adjacency over all edges in both directions.
  std::map<NodeId, std::vector<std::pair<const graph::Edge*, bool>>> adj;
  for (const graph::Edge& e : g.edges()) {
    adj[e.src].push_back({&e, true});
    adj[e.dst].push_back({&e, false});
  }

  using L = Layer;
  const std::vector<std::vector<L>> backbone{{L::kEpisode},
                                             {L::kFacet, L::kEpisode},
                                             {L::kFacetPoint, L::kFacet, L::kEpisode},
                                             {L::kEntity, L::kFacetPoint, L::kFacet, L::kEpisode},
                                             {L::kEntity, L::kFacet, L::kEpisode}};

  std::map<NodeId, double> best;
  struct Step {
    const graph::Edge* edge;
    bool forward;
  };
  std::vector<Step> walk;
  std::function<void(const NodeId&, double, const NodeId&)> dfs = [&](const NodeId& at, double total,
                                                                      const NodeId& anchor) {
    const graph::Node& node = g.node(at);
    if (node.layer == L::kEpisode) {
      bool ok = false;
      const bool all_up = std::all_of(walk.begin(), walk.end(), [](const Step& s) {
        return s.edge->kind == EdgeKind::kBelongsTo && s.forward;
      });
      if (all_up) {
        std::vector<L> layers{g.node(anchor).layer};
        for (const Step& s : walk) layers.push_back(g.node(s.edge->dst).layer);
        ok = std::find(backbone.begin(), backbone.end(), layers) != backbone.end();
      } else if (config.bridges && !walk.empty()) {
        const EdgeKind k = walk.front().edge->kind;
        const bool bridge = k == EdgeKind::kTemporal || k == EdgeKind::kCausal || k == EdgeKind::kEvolution;
        ok = bridge && std::all_of(walk.begin() + 1, walk.end(), [](const Step& s) {
               return s.edge->kind == EdgeKind::kBelongsTo && s.forward;
             });
      }
      if (ok) {
        auto [it, inserted] = best.emplace(at, total);
        if (!inserted) it->second = std::min(it->second, total);
      }
    }
    if (walk.size() >= config.max_hops) return;
    auto found = adj.find(at);
    if (found == adj.end()) return;
    for (const auto& [edge, forward] : found->second) {
      walk.push_back({edge, forward});
      dfs(forward ? edge->dst : edge->src, total + (cost(*edge) + 0.05), anchor);
      walk.pop_back();
    }
  };
  for (const auto& [anchor, c] : anchor_cost) dfs(anchor, c, anchor);

  std::map<NodeId, std::size_t> position;
  for (std::size_t i = 0; i < g.episode_chain().size(); ++i) position[g.episode_chain()[i]] = i;
  std::vector<OracleEntry> out;
  for (const auto& [ep, score] : best) out.push_back({ep.value, score});
  std::sort(out.begin(), out.end(), [&](const OracleEntry& a, const OracleEntry& b) {
    if (a.score != b.score) return a.score < b.score;
    const auto pa = position.at(NodeId{a.episode});
    const auto pb = position.at(NodeId{b.episode});
    if (pa != pb) return pa < pb;
    return a.episode < b.episode;
  });
  if (out.size() > config.bundle_size) out.resize(config.bundle_size);
  return out;
}

}  // namespace strata::testing
