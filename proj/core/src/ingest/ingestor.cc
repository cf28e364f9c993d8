#include "strata/ingest/ingestor.h"

#include <algorithm>
#include <set>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "strata/common/error.h"
#include "strata/common/json_extract.h"
#include "strata/common/text.h"
#include "strata/common/time.h"
#include "strata/llm/chat_client.h"
#include "strata/llm/prompts.h"

namespace strata::ingest {

using graph::EdgeKind;
using graph::Layer;
using graph::NodeId;
using nlohmann::json;

namespace {

std::string clip(std::string_view s, std::size_t n) { return text::truncate_chars(text::collapse_whitespace(s), n); }

}  // namespace

json IngestReport::to_json() const {
  return json{{"fresh", fresh},
              {"duplicate", duplicate},
              {"failed", failed},
              {"fallback", fallback},
              {"causal_passes", causal_passes},
              {"causal_failures", causal_failures},
              {"causal_edges", causal_edges},
              {"edges_by_kind", edges_by_kind},
              {"failures", failures}};
}

Ingestor::Ingestor(graph::Memory& memory, index::Embedder& embedder, Extractor& extractor,
                   llm::ChatClient* causal_client, IngestConfig config)
    : memory_(memory), embedder_(embedder), extractor_(extractor), causal_client_(causal_client), config_(config) {
  if (embedder_.dimension() != memory_.stores.dimension()) {
    throw InputError("embedder dimension " + std::to_string(embedder_.dimension()) + " does not match the stores (" +
                     std::to_string(memory_.stores.dimension()) + ")");
  }
  if (memory_.embedder_identity.empty()) {
    memory_.embedder_identity = embedder_.identity();
  } else if (memory_.embedder_identity != embedder_.identity()) {
    spdlog::warn("extending memory built with embedder '{}' using '{}'", memory_.embedder_identity,
                 embedder_.identity());
  }
  for (const graph::Node& n : memory_.graph.nodes()) {
    if (n.layer == Layer::kEntity) entity_by_name_.emplace(std::pair{n.conversation_id, text::normalize_name(n.text)}, n.id);
  }
}

DedupStatus Ingestor::dedup_check(const RawChunk& chunk) const {
  return memory_.graph.has_hash(chunk.content_hash) ? DedupStatus::kDuplicate : DedupStatus::kFresh;
}

std::uint32_t Ingestor::add_row(index::StoreName store, const index::Embedding& v, std::string owner) {
  return memory_.stores[store].add(v, std::move(owner));
}

NodeId Ingestor::add_embedded_node(graph::Node node, const index::Embedding& v) {
  auto& store = memory_.stores[index::store_for(node.layer)];
  node.embedding_ref = static_cast<std::uint32_t>(store.size());
  const NodeId id = memory_.graph.add_node(std::move(node));
  store.add(v, id.value);
  return id;
}

std::optional<graph::EdgeId> Ingestor::add_relation(EdgeKind kind, const NodeId& src, const NodeId& dst,
                                                    std::string description, std::optional<double> confidence) {
  if (src == dst || memory_.graph.find_edge(kind, src, dst)) return std::nullopt;
  const index::Embedding v = index::embed_and_normalize(embedder_, description);
  auto& store = memory_.stores[index::store_for(kind)];
  graph::Edge edge;
  edge.kind = kind;
  edge.src = src;
  edge.dst = dst;
  edge.description = std::move(description);
  edge.embedding_ref = static_cast<std::uint32_t>(store.size());
  edge.confidence = confidence;
  const graph::EdgeId id = memory_.graph.add_edge(std::move(edge));
  store.add(v, graph::edge_owner(id));
  return id;
}

void Ingestor::add_belongs_to(const NodeId& src, const NodeId& dst) {
  if (memory_.graph.find_edge(EdgeKind::kBelongsTo, src, dst)) return;
  graph::Edge edge;
  edge.kind = EdgeKind::kBelongsTo;
  edge.src = src;
  edge.dst = dst;
  memory_.graph.add_edge(std::move(edge));
}

NodeId Ingestor::merge_entity(const std::string& conversation_id, std::string_view name, std::string_view entity_type,
                              const index::Embedding& embedding) {
  const std::string key = text::normalize_name(name);
  if (key.empty()) throw InputError("entity name is blank");
  if (auto it = entity_by_name_.find({conversation_id, key}); it != entity_by_name_.end()) return it->second;

  const auto& store = memory_.stores[index::StoreName::kEntity];
  std::optional<NodeId> best;
  double best_sim = config_.entity_merge_threshold;
  for (std::uint32_t r = 0; r < store.size(); ++r) {
    const graph::Node* other = memory_.graph.find_node(NodeId{store.owner(r)});
    if (!other || other->conversation_id != conversation_id) continue;
    const double sim = index::dot(embedding, store.row(r));
    if (sim > best_sim) {
      best_sim = sim;
      best = other->id;
    }
  }
  if (best) {
    entity_by_name_.emplace(std::pair{conversation_id, key}, *best);
    return *best;
  }

  graph::Node node;
  node.id = graph::make_node_id(Layer::kEntity, conversation_id, name, "");
  node.layer = Layer::kEntity;
  node.text = text::trim(name);
  node.entity_type = std::string(entity_type);
  node.conversation_id = conversation_id;
  const NodeId id = add_embedded_node(std::move(node), embedding);
  entity_by_name_.emplace(std::pair{conversation_id, key}, id);
  return id;
}

NodeId Ingestor::merge_facet(const NodeId& episode, std::string_view theme, const index::Embedding& embedding) {
  const graph::Node& ep = memory_.graph.node(episode);
  if (ep.layer != Layer::kEpisode) throw GraphError("'" + episode.value + "' is not an Episode");

  const auto& store = memory_.stores[index::StoreName::kFacet];
  std::optional<NodeId> best;
  double best_sim = config_.facet_merge_threshold;
  for (const graph::Neighbor& n : memory_.graph.neighbors(episode, EdgeKind::kBelongsTo, graph::Direction::kIn)) {
    if (n.node->layer != Layer::kFacet || !n.node->embedding_ref) continue;
    const double sim = index::dot(embedding, store.row(*n.node->embedding_ref));
    if (sim > best_sim) {
      best_sim = sim;
      best = n.node->id;
    }
  }
  if (best) return *best;

  graph::Node node;
  node.layer = Layer::kFacet;
  node.text = text::trim(theme);
  node.conversation_id = ep.conversation_id;
  node.id = graph::make_node_id(Layer::kFacet, ep.conversation_id, theme, "", episode.value);
  for (int n = 1; memory_.graph.contains(node.id); ++n) {
    node.id = graph::make_node_id(Layer::kFacet, ep.conversation_id, theme, "", episode.value + "#" + std::to_string(n));
  }
  const NodeId id = add_embedded_node(std::move(node), embedding);
  add_belongs_to(id, episode);
  return id;
}

std::optional<std::string> Ingestor::resolve_timestamp(const ExtractedFacetPoint& fp,
                                                       const ExtractionResult& result) const {
  if (!fp.timestamp_text) return std::nullopt;
  if (parse_iso8601(*fp.timestamp_text)) return fp.timestamp_text;
  const std::string expr = text::normalize_name(*fp.timestamp_text);
  for (const auto& t : result.temporal_info) {
    if (t.normalized_time && text::normalize_name(t.time_expression) == expr) return t.normalized_time;
  }
  const std::string content = text::normalize_name(fp.content);
  for (const auto& t : result.temporal_info) {
    if (t.normalized_time && text::normalize_name(t.subject) == content) return t.normalized_time;
  }
  return std::nullopt;
}

std::int64_t Ingestor::effective_time(const NodeId& facet_point) const {
  const graph::Node& n = memory_.graph.node(facet_point);
  if (n.timestamp) return parse_iso8601(*n.timestamp)->begin;
  const graph::Node& ep = memory_.graph.node(memory_.graph.episode_of(facet_point));
  return parse_iso8601(*ep.timestamp)->begin;
}

NodeId Ingestor::build_chunk_subgraph(const RawChunk& chunk, const ExtractionResult& result) {
  const std::string& conv = chunk.conversation_id;

  // Episode and its place in the chain.
  graph::Node ep;
  ep.layer = Layer::kEpisode;
  ep.text = result.episode_summary;
  ep.timestamp = chunk.header_timestamp;
  ep.conversation_id = conv;
  ep.chunk_hash = chunk.content_hash;
  ep.id = graph::make_node_id(Layer::kEpisode, conv, result.episode_summary, chunk.header_timestamp, chunk.content_hash);
  const index::Embedding summary_vec = index::embed_and_normalize(embedder_, result.episode_summary);
  const NodeId episode = add_embedded_node(std::move(ep), summary_vec);

  if (config_.link_episode_chain) {
    const auto& chain = memory_.graph.episode_chain();
    const std::size_t pos = memory_.graph.chain_position(episode);
    auto neighbour = [&](std::size_t from, int step) -> std::optional<NodeId> {
      for (auto i = static_cast<std::ptrdiff_t>(from) + step; i >= 0 && i < static_cast<std::ptrdiff_t>(chain.size());
           i += step) {
        if (memory_.graph.node(chain[static_cast<std::size_t>(i)]).conversation_id == conv) {
          return chain[static_cast<std::size_t>(i)];
        }
      }
      return std::nullopt;
    };
    const auto prev = neighbour(pos, -1);
    const auto next = neighbour(pos, +1);
    auto link = [&](const NodeId& a, const NodeId& b) {
      add_relation(EdgeKind::kTemporal, a, b,
                   clip(memory_.graph.node(a).text, 200) + " | then | " + clip(memory_.graph.node(b).text, 200));
    };
    if (prev) link(*prev, episode);
    if (next) link(episode, *next);
  }

  // Entities, keyed by normalised name for this chunk.
  std::map<std::string, NodeId> local_entities;
  for (const auto& e : result.entities) {
    const index::Embedding v = index::embed_and_normalize(embedder_, e.name);
    local_entities.emplace(text::normalize_name(e.name), merge_entity(conv, e.name, e.entity_type, v));
  }
  auto resolve_entity = [&](const std::string& name) -> std::optional<NodeId> {
    const std::string key = text::normalize_name(name);
    if (auto it = local_entities.find(key); it != local_entities.end()) return it->second;
    if (auto it = entity_by_name_.find({conv, key}); it != entity_by_name_.end()) return it->second;
    return std::nullopt;
  };

  // FacetPoints.
  std::vector<NodeId> points;
  std::vector<index::Embedding> point_vecs;
  for (std::size_t i = 0; i < result.facet_points.size(); ++i) {
    const auto& fp = result.facet_points[i];
    graph::Node node;
    node.layer = Layer::kFacetPoint;
    node.text = fp.content;
    node.timestamp = resolve_timestamp(fp, result);
    node.conversation_id = conv;
    node.id = graph::make_node_id(Layer::kFacetPoint, conv, fp.content, node.timestamp.value_or(""),
                                  episode.value + "#" + std::to_string(i));
    point_vecs.push_back(index::embed_and_normalize(embedder_, fp.content));
    points.push_back(add_embedded_node(std::move(node), point_vecs.back()));
  }

  // Facets; FacetPoints left out of every facet share one under the summary.
  std::vector<bool> grouped(points.size(), false);
  std::vector<NodeId> facets;
  for (const auto& f : result.facets) {
    const NodeId facet = merge_facet(episode, f.theme, index::embed_and_normalize(embedder_, f.theme));
    facets.push_back(facet);
    for (std::size_t i : f.facet_point_indices) {
      add_belongs_to(points[i], facet);
      grouped[i] = true;
    }
  }
  if (std::find(grouped.begin(), grouped.end(), false) != grouped.end()) {
    const NodeId facet = merge_facet(episode, result.episode_summary, summary_vec);
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (!grouped[i]) add_belongs_to(points[i], facet);
    }
  }

  // Entity links.
  std::map<NodeId, std::vector<std::size_t>> entity_points;
  std::map<NodeId, std::vector<NodeId>> prior_points;
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& name = result.facet_points[i].related_entity_name;
    if (!name) continue;
    const auto entity = resolve_entity(*name);
    if (!entity) continue;
    if (!entity_points.contains(*entity)) {
      auto& prior = prior_points[*entity];
      for (const auto& n : memory_.graph.neighbors(*entity, EdgeKind::kBelongsTo, graph::Direction::kOut)) {
        if (n.node->layer == Layer::kFacetPoint) prior.push_back(n.node->id);
      }
    }
    entity_points[*entity].push_back(i);
    add_belongs_to(*entity, points[i]);
    add_relation(EdgeKind::kInvolvesEntity, points[i], *entity,
                 clip(result.facet_points[i].content, 200) + " | involves | " + memory_.graph.node(*entity).text);
  }
  for (const auto& [key, entity] : local_entities) {
    for (const NodeId& facet : facets) {
      if (text::normalize_name(memory_.graph.node(facet).text).find(key) != std::string::npos) {
        add_belongs_to(entity, facet);
      }
    }
  }

  // Temporal edges among timestamped FacetPoints in the window.
  std::vector<NodeId> window_points;
  for (const NodeId& old_ep : recent_episodes_) {
    const auto it = episode_points_.find(old_ep);
    if (it != episode_points_.end()) window_points.insert(window_points.end(), it->second.begin(), it->second.end());
  }
  auto span_of = [&](const NodeId& id) -> std::optional<TimeSpan> {
    const auto& ts = memory_.graph.node(id).timestamp;
    return ts ? parse_iso8601(*ts) : std::nullopt;
  };
  auto temporal_link = [&](const NodeId& a, const NodeId& b) {
    const auto sa = span_of(a);
    const auto sb = span_of(b);
    if (!sa || !sb) return;
    auto describe = [&](const NodeId& x, const NodeId& y) {
      return clip(memory_.graph.node(x).text, 200) + " | before | " + clip(memory_.graph.node(y).text, 200);
    };
    if (definitely_before(*sa, *sb)) {
      add_relation(EdgeKind::kTemporal, a, b, describe(a, b));
    } else if (definitely_before(*sb, *sa)) {
      add_relation(EdgeKind::kTemporal, b, a, describe(b, a));
    }
  };
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (const NodeId& old : window_points) temporal_link(old, points[i]);
    for (std::size_t j = i + 1; j < points.size(); ++j) temporal_link(points[i], points[j]);
  }

  // Evolution edges per shared Entity.
  for (const auto& [entity, indices] : entity_points) {
    std::vector<Timed> fresh;
    for (std::size_t k = 0; k < indices.size(); ++k) {
      fresh.push_back({points[indices[k]], effective_time(points[indices[k]]), k});
    }
    std::stable_sort(fresh.begin(), fresh.end(), [](const Timed& a, const Timed& b) { return a.time < b.time; });
    const std::string& entity_name = memory_.graph.node(entity).text;
    auto evolve = [&](const NodeId& a, const NodeId& b) {
      add_relation(EdgeKind::kEvolution, a, b,
                   entity_name + ": " + clip(memory_.graph.node(a).text, 200) + " | later | " +
                       clip(memory_.graph.node(b).text, 200));
    };
    const auto& prior = prior_points[entity];
    if (!prior.empty()) {
      Timed latest{prior.front(), effective_time(prior.front()), 0};
      for (std::size_t k = 1; k < prior.size(); ++k) {
        const std::int64_t t = effective_time(prior[k]);
        if (t >= latest.time) latest = {prior[k], t, k};
      }
      if (latest.time <= fresh.front().time) {
        evolve(latest.id, fresh.front().id);
      } else {
        evolve(fresh.front().id, latest.id);
      }
    }
    for (std::size_t k = 1; k < fresh.size(); ++k) evolve(fresh[k - 1].id, fresh[k].id);
  }

  // Optional Semantic edges to the closest FacetPoint of another episode.
  if (config_.semantic_threshold) {
    const auto& store = memory_.stores[index::StoreName::kFacetPoint];
    const std::set<NodeId> mine(points.begin(), points.end());
    for (std::size_t i = 0; i < points.size(); ++i) {
      std::optional<NodeId> best;
      double best_sim = *config_.semantic_threshold;
      for (std::uint32_t r = 0; r < store.size(); ++r) {
        const NodeId other{store.owner(r)};
        if (mine.contains(other) || memory_.graph.node(other).conversation_id != conv) continue;
        const double sim = index::dot(point_vecs[i], store.row(r));
        if (sim >= best_sim) {
          best_sim = sim;
          best = other;
        }
      }
      if (best) {
        add_relation(EdgeKind::kSemantic, points[i], *best,
                     clip(result.facet_points[i].content, 200) + " | resembles | " +
                         clip(memory_.graph.node(*best).text, 200));
      }
    }
  }

  memory_.graph.record_hash(chunk.content_hash);
  memory_.chunks[chunk.content_hash] = graph::ChunkRecord{conv, chunk.header_timestamp, chunk.text, chunk.dia_ids};
  episode_points_[episode] = points;
  recent_episodes_.push_back(episode);
  while (recent_episodes_.size() > std::max(config_.temporal_window, config_.causal_window)) {
    episode_points_.erase(recent_episodes_.front());
    recent_episodes_.pop_front();
  }
  return episode;
}

std::vector<CausalPair> Ingestor::consolidate_causal() {
  if (!causal_client_) throw BackendError("no chat client configured for causal consolidation");
  std::vector<NodeId> snapshot;
  const std::size_t n = std::min(config_.causal_window, recent_episodes_.size());
  snapshot.assign(recent_episodes_.end() - static_cast<std::ptrdiff_t>(n), recent_episodes_.end());
  if (snapshot.empty()) return {};

  std::string events;
  for (const NodeId& id : snapshot) {
    const graph::Node& ep = memory_.graph.node(id);
    events += (events.empty() ? "" : "\n") + ("[" + id.value + "] (" + *ep.timestamp + ") ") +
              text::collapse_whitespace(ep.text);
  }
  const std::string prompt = llm::render(llm::prompt_template(llm::kCausalPrompt), {{"events", events}});
  const std::string reply = causal_client_->complete({}, prompt);
  const auto doc = first_json(reply, '{');
  if (!doc || !doc->contains("causal_pairs") || !(*doc)["causal_pairs"].is_array()) {
    throw InputError("causal reply lacks a causal_pairs array");
  }

  std::vector<CausalPair> accepted;
  for (const json& p : (*doc)["causal_pairs"]) {
    if (!p.is_object() || !p.contains("cause_id") || !p["cause_id"].is_string() || !p.contains("effect_id") ||
        !p["effect_id"].is_string() || !p.contains("confidence") || !p["confidence"].is_number()) {
      continue;
    }
    CausalPair pair{NodeId{p["cause_id"].get<std::string>()}, NodeId{p["effect_id"].get<std::string>()},
                    p.contains("description") && p["description"].is_string() ? text::trim(p["description"].get<std::string>())
                                                                               : std::string(),
                    p["confidence"].get<double>()};
    if (pair.confidence < graph::kCausalConfidenceFloor || pair.confidence > 1.0) continue;
    if (pair.cause == pair.effect) continue;
    const graph::Node* cause = memory_.graph.find_node(pair.cause);
    const graph::Node* effect = memory_.graph.find_node(pair.effect);
    if (!cause || !effect || cause->layer != Layer::kEpisode || effect->layer != Layer::kEpisode) continue;
    std::string description = pair.description;
    if (description.empty()) description = clip(cause->text, 200) + " | causes | " + clip(effect->text, 200);
    if (add_relation(EdgeKind::kCausal, pair.cause, pair.effect, description, pair.confidence)) {
      accepted.push_back(std::move(pair));
    }
  }
  return accepted;
}

void Ingestor::run_causal_pass() {
  ++report_.causal_passes;
  try {
    report_.causal_edges += consolidate_causal().size();
    pending_causal_ = 0;
  } catch (const Error& e) {
    ++report_.causal_failures;
    report_.failures.push_back(std::string("causal pass: ") + e.what());
    spdlog::warn("causal consolidation failed, will retry: {}", e.what());
  }
}

void Ingestor::ingest_chunk(const RawChunk& chunk) {
  if (dedup_check(chunk) == DedupStatus::kDuplicate) {
    ++report_.duplicate;
    return;
  }
  std::optional<ExtractionResult> result;
  try {
    result = extractor_.extract(chunk);
  } catch (const std::exception& e) {
    spdlog::warn("extraction failed for chunk {}: {}; using fallback", chunk.content_hash.substr(0, 12), e.what());
    try {
      result = fallback_.extract(chunk);
      ++report_.fallback;
    } catch (const std::exception& e2) {
      ++report_.failed;
      report_.failures.push_back("chunk " + chunk.content_hash + ": " + e2.what());
      return;
    }
  }
  try {
    build_chunk_subgraph(chunk, *result);
  } catch (const Error& e) {
    ++report_.failed;
    report_.failures.push_back("chunk " + chunk.content_hash + ": " + e.what());
    return;
  }
  ++report_.fresh;
  if (config_.causal_consolidation && causal_client_) {
    ++pending_causal_;
    if (pending_causal_ >= config_.causal_interval) run_causal_pass();
  }
}

void Ingestor::finish() {
  if (config_.causal_consolidation && causal_client_ && pending_causal_ > 0) run_causal_pass();
}

void Ingestor::tally_edges(std::size_t from) {
  const auto edges = memory_.graph.edges();
  for (std::size_t i = from; i < edges.size(); ++i) ++report_.edges_by_kind[std::string(graph::to_string(edges[i].kind))];
}

IngestReport Ingestor::ingest(std::span<const RawChunk> chunks) {
  const std::size_t edges_before = memory_.graph.edge_count();
  for (const RawChunk& chunk : chunks) ingest_chunk(chunk);
  finish();
  tally_edges(edges_before);
  return report_;
}

}  // namespace strata::ingest
