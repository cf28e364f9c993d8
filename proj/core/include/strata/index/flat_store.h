#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "strata/graph/types.h"

namespace strata::index {

enum class StoreName : std::uint8_t { kEpisode, kFacet, kFacetPoint, kEntity, kEdgeRelation, kEdgeSemantic };

inline constexpr std::array<StoreName, 6> kAllStores{StoreName::kEpisode,    StoreName::kFacet,
                                                      StoreName::kFacetPoint, StoreName::kEntity,
                                                      StoreName::kEdgeRelation, StoreName::kEdgeSemantic};

std::string_view to_string(StoreName name);
std::optional<StoreName> parse_store_name(std::string_view s);

StoreName store_for(graph::Layer layer);
// Semantic edges go to edge_semantic, every other relation kind to edge_relation.
StoreName store_for(graph::EdgeKind kind);

struct SearchHit {
  std::string owner;
  std::uint32_t row = 0;
  double similarity = 0.0;
  double distance = 0.0;  // 1 - similarity
};

// Exact inner-product index over unit vectors (cosine by construction).
class FlatVectorStore {
 public:
  FlatVectorStore(std::string name, std::size_t dimension);

  // Appends a row owned by `owner` and returns its index.
  std::uint32_t add(std::span<const float> vector, std::string owner);

  // Hits sorted by descending similarity, ties by ascending row. Returns
  // min(k, size()) hits; empty stores yield no hits.
  std::vector<SearchHit> top_k(std::span<const float> query, std::size_t k) const;

  std::span<const float> row(std::uint32_t index) const;
  const std::string& owner(std::uint32_t index) const { return owners_.at(index); }
  void set_owner(std::uint32_t index, std::string owner) { owners_.at(index) = std::move(owner); }

  const std::string& name() const { return name_; }
  std::size_t dimension() const { return dimension_; }
  std::size_t size() const { return owners_.size(); }
  std::span<const float> data() const { return data_; }

  // Rebuilds a store from a row-major matrix; owners are left empty.
  static FlatVectorStore from_rows(std::string name, std::size_t dimension, std::vector<float> data);

  friend bool operator==(const FlatVectorStore&, const FlatVectorStore&) = default;

 private:
  std::string name_;
  std::size_t dimension_;
  std::vector<float> data_;
  std::vector<std::string> owners_;
};

// The six named stores: one per node layer plus two edge stores.
class VectorStores {
 public:
  explicit VectorStores(std::size_t dimension = 384);

  FlatVectorStore& operator[](StoreName name) { return stores_[static_cast<std::size_t>(name)]; }
  const FlatVectorStore& operator[](StoreName name) const { return stores_[static_cast<std::size_t>(name)]; }

  std::size_t dimension() const { return dimension_; }

  // Swaps in a rebuilt store (checkpoint loading).
  void reset(StoreName name, FlatVectorStore store);

  friend bool operator==(const VectorStores&, const VectorStores&) = default;

 private:
  std::size_t dimension_;
  std::vector<FlatVectorStore> stores_;
};

}  // namespace strata::index
