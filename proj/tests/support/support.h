#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "strata/graph/checkpoint.h"
#include "strata/index/embedder.h"
#include "strata/retrieval/edge_cost.h"
#include "strata/routing/intent.h"

namespace strata::testing {

// Returns registered vectors verbatim; anything else goes to a hash embedder
// of the same dimension.
class FixedEmbedder final : public index::Embedder {
 public:
  explicit FixedEmbedder(std::size_t dimension) : dimension_(dimension), fallback_(dimension) {}

  void set(const std::string& text, std::vector<float> v) { vectors_[text] = std::move(v); }
  std::string identity() const override { return "fixed/d" + std::to_string(dimension_); }
  std::size_t dimension() const override { return dimension_; }
  std::vector<float> embed_raw(std::string_view text) override;

 private:
  std::size_t dimension_;
  index::HashEmbedder fallback_;
  std::map<std::string, std::vector<float>, std::less<>> vectors_;
};

std::vector<float> random_unit(std::size_t dimension, std::mt19937_64& rng);

// Unit vector whose cosine with the unit vector `q` is `c` (up to float rounding).
std::vector<float> with_cosine(std::span<const float> q, double c, std::mt19937_64& rng);

struct RandomGraphOptions {
  std::size_t min_nodes = 20;
  std::size_t max_nodes = 200;
  std::size_t dimension = 16;
  // Share of nodes that copy an earlier node's vector, to force cost ties.
  double duplicate_vector_rate = 0.15;
  // Share of relation edges stored with an embedding.
  double edge_embedding_rate = 0.6;
};

// Well-formed memory with all four layers, BelongsTo hierarchy, relation
// edges of every kind and repeated episode timestamps.
graph::Memory random_memory(std::uint64_t seed, const RandomGraphOptions& options = {});

struct OracleEntry {
  std::string episode;
  double score = 0.0;
};

struct OracleConfig {
  std::size_t k_per_layer = 30;
  std::size_t bundle_size = 10;
  bool bridges = true;
  bool intent_costs = true;
  std::size_t max_hops = 4;
};

// Brute force: every walk of up to max_hops edges (any direction) from every
// anchor is matched against the eight templates by layer and edge kind, scored
// from scratch and reduced to per-episode minima.
std::vector<OracleEntry> oracle_bundle(const graph::Memory& memory, std::span<const float> query,
                                       routing::IntentSet intents, const OracleConfig& config);

// Hand-written cost table: fallbacks 0.02 (BelongsTo) and 0.90, discounts
// 0.5 / 0.5 / 0.7.
double reference_edge_cost(graph::EdgeKind kind, routing::IntentSet intents, bool in_recall,
                           std::optional<double> cosine);

}  // namespace strata::testing
