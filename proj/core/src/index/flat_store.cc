#include "strata/index/flat_store.h"

#include <algorithm>
#include <numeric>

#include "strata/common/error.h"
#include "strata/index/embedder.h"

namespace strata::index {

std::string_view to_string(StoreName name) {
  switch (name) {
    case StoreName::kEpisode: return "episode";
    case StoreName::kFacet: return "facet";
    case StoreName::kFacetPoint: return "facet_point";
    case StoreName::kEntity: return "entity";
    case StoreName::kEdgeRelation: return "edge_relation";
    case StoreName::kEdgeSemantic: return "edge_semantic";
  }
  return "unknown";
}

std::optional<StoreName> parse_store_name(std::string_view s) {
  for (StoreName n : kAllStores) {
    if (to_string(n) == s) return n;
  }
  return std::nullopt;
}

StoreName store_for(graph::Layer layer) {
  switch (layer) {
    case graph::Layer::kEpisode: return StoreName::kEpisode;
    case graph::Layer::kFacet: return StoreName::kFacet;
    case graph::Layer::kFacetPoint: return StoreName::kFacetPoint;
    case graph::Layer::kEntity: return StoreName::kEntity;
  }
  return StoreName::kEpisode;
}

StoreName store_for(graph::EdgeKind kind) {
  return kind == graph::EdgeKind::kSemantic ? StoreName::kEdgeSemantic : StoreName::kEdgeRelation;
}

FlatVectorStore::FlatVectorStore(std::string name, std::size_t dimension)
    : name_(std::move(name)), dimension_(dimension) {}

std::uint32_t FlatVectorStore::add(std::span<const float> vector, std::string owner) {
  if (vector.size() != dimension_) {
    throw InputError("store '" + name_ + "' expects dimension " + std::to_string(dimension_) + ", got " +
                     std::to_string(vector.size()));
  }
  const auto index = static_cast<std::uint32_t>(owners_.size());
  data_.insert(data_.end(), vector.begin(), vector.end());
  owners_.push_back(std::move(owner));
  return index;
}

std::span<const float> FlatVectorStore::row(std::uint32_t index) const {
  if (index >= owners_.size()) throw InputError("row " + std::to_string(index) + " out of range in '" + name_ + "'");
  return std::span<const float>(data_).subspan(static_cast<std::size_t>(index) * dimension_, dimension_);
}

std::vector<SearchHit> FlatVectorStore::top_k(std::span<const float> query, std::size_t k) const {
  if (k == 0) throw InputError("top_k requires k >= 1");
  if (query.size() != dimension_) throw InputError("query dimension mismatch for store '" + name_ + "'");
  const std::size_t n = size();
  std::vector<double> sims(n);
  for (std::size_t r = 0; r < n; ++r) sims[r] = dot(query, row(static_cast<std::uint32_t>(r)));

  std::vector<std::uint32_t> order(n);
  std::iota(order.begin(), order.end(), 0u);
  const std::size_t take = std::min(k, n);
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(),
                    [&](std::uint32_t a, std::uint32_t b) { return sims[a] > sims[b] || (sims[a] == sims[b] && a < b); });

  std::vector<SearchHit> hits;
  hits.reserve(take);
  for (std::size_t i = 0; i < take; ++i) {
    const std::uint32_t r = order[i];
    hits.push_back(SearchHit{owners_[r], r, sims[r], 1.0 - sims[r]});
  }
  return hits;
}

FlatVectorStore FlatVectorStore::from_rows(std::string name, std::size_t dimension, std::vector<float> data) {
  if (dimension == 0 || data.size() % dimension != 0) {
    throw CheckpointError("vector data for '" + name + "' is not a whole number of rows");
  }
  FlatVectorStore store(std::move(name), dimension);
  store.owners_.resize(data.size() / dimension);
  store.data_ = std::move(data);
  return store;
}

VectorStores::VectorStores(std::size_t dimension) : dimension_(dimension) {
  stores_.reserve(kAllStores.size());
  for (StoreName n : kAllStores) stores_.emplace_back(std::string(to_string(n)), dimension);
}

void VectorStores::reset(StoreName name, FlatVectorStore store) {
  if (store.dimension() != dimension_) throw CheckpointError("store dimension does not match the checkpoint");
  stores_[static_cast<std::size_t>(name)] = std::move(store);
}

}  // namespace strata::index
