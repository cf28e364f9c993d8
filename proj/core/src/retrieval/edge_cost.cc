#include "strata/retrieval/edge_cost.h"

#include "strata/index/embedder.h"

namespace strata::retrieval {

using graph::EdgeKind;
using routing::IntentLabel;

double alpha(EdgeKind kind, routing::IntentSet intents, const CostParams& params) {
  if (kind == EdgeKind::kTemporal && intents.contains(IntentLabel::kTemporal)) return params.alpha_temporal;
  if (kind == EdgeKind::kCausal && intents.contains(IntentLabel::kCausal)) return params.alpha_causal;
  if (kind == EdgeKind::kEvolution && intents.contains(IntentLabel::kTemporal)) return params.alpha_evolution;
  return 1.0;
}

double edge_cost(EdgeKind kind, routing::IntentSet intents, bool in_recall, std::optional<double> cosine,
                 const CostParams& params) {
  const bool similarity = kind != EdgeKind::kBelongsTo && in_recall && cosine.has_value();
  const double base = similarity ? 1.0 - *cosine : params.fallback(kind);
  return alpha(kind, intents, params) * base;
}

EdgeCostModel::EdgeCostModel(routing::IntentSet intents, const std::unordered_set<graph::EdgeId>* recall,
                             const index::VectorStores* stores, std::span<const float> query, CostParams params,
                             bool intent_discounts)
    : intents_(intent_discounts ? intents : routing::IntentSet::general()),
      recall_(recall),
      stores_(stores),
      query_(query),
      params_(params) {}

double EdgeCostModel::cost(const graph::Edge& edge) const {
  std::optional<double> cosine;
  const bool recalled = in_recall(edge.id);
  if (recalled && edge.embedding_ref && stores_ && !query_.empty()) {
    cosine = index::dot((*stores_)[index::store_for(edge.kind)].row(*edge.embedding_ref), query_);
  }
  return edge_cost(edge.kind, intents_, recalled, cosine, params_);
}

}  // namespace strata::retrieval
