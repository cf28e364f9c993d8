#pragma once

#include <array>
#include <optional>
#include <span>
#include <unordered_set>

#include "strata/graph/types.h"
#include "strata/index/flat_store.h"
#include "strata/routing/intent.h"

namespace strata::retrieval {

struct CostParams {
  double c_hop = 0.05;
  // Fallback cost per edge kind, indexed by EdgeKind.
  std::array<double, 6> c0{0.02, 0.90, 0.90, 0.90, 0.90, 0.90};
  double alpha_temporal = 0.5;   // Temporal edge, Temporal intent
  double alpha_causal = 0.5;     // Causal edge, Causal intent
  double alpha_evolution = 0.7;  // Evolution edge, Temporal intent

  double fallback(graph::EdgeKind kind) const { return c0[static_cast<std::size_t>(kind)]; }
};

// Intent discount for an edge kind; 1 unless one of the three matched rows applies.
double alpha(graph::EdgeKind kind, routing::IntentSet intents, const CostParams& params = {});

// alpha * base, where base is 1 - cosine for an in-recall edge with an
// embedding and the kind's fallback otherwise. BelongsTo ignores `cosine`.
double edge_cost(graph::EdgeKind kind, routing::IntentSet intents, bool in_recall, std::optional<double> cosine,
                 const CostParams& params = {});

// Query-bound cost model: intents, recall set and edge embeddings.
class EdgeCostModel {
 public:
  EdgeCostModel(routing::IntentSet intents, const std::unordered_set<graph::EdgeId>* recall,
                const index::VectorStores* stores, std::span<const float> query, CostParams params = {},
                bool intent_discounts = true);

  double cost(const graph::Edge& edge) const;
  bool in_recall(graph::EdgeId id) const { return recall_ && recall_->contains(id); }
  const CostParams& params() const { return params_; }
  routing::IntentSet intents() const { return intents_; }

 private:
  routing::IntentSet intents_;
  const std::unordered_set<graph::EdgeId>* recall_;
  const index::VectorStores* stores_;
  std::span<const float> query_;
  CostParams params_;
};

}  // namespace strata::retrieval
