#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "strata/graph/memory_graph.h"
#include "strata/index/flat_store.h"

namespace strata::graph {

// Raw chunk text kept alongside the graph, keyed by content hash.
struct ChunkRecord {
  std::string conversation_id;
  std::string timestamp;
  std::string text;
  std::vector<std::string> dia_ids;

  friend bool operator==(const ChunkRecord&, const ChunkRecord&) = default;
};

using ChunkStore = std::map<std::string, ChunkRecord>;

// Everything one ingestion run produces and every query consumes.
struct Memory {
  explicit Memory(std::size_t dimension = 384) : stores(dimension) {}

  MemoryGraph graph;
  index::VectorStores stores;
  ChunkStore chunks;
  std::string embedder_identity;

  friend bool operator==(const Memory&, const Memory&) = default;
};

// Writes graph.json, chunks.json, hashes.json and vectors/{<store>.f32,
// manifest.json} under `dir` (created if missing).
void save_checkpoint(const Memory& memory, const std::filesystem::path& dir);

// Inverse of save_checkpoint. Throws CheckpointError on schema mismatch, a
// vector file whose length is not a multiple of d*4 bytes, or row counts that
// disagree with the manifest. An embedder identity different from
// `expected_embedder` (when nonempty) only logs a warning.
Memory load_checkpoint(const std::filesystem::path& dir, std::string_view expected_embedder = {});

nlohmann::json graph_to_json(const MemoryGraph& graph);
MemoryGraph graph_from_json(const nlohmann::json& doc);

}  // namespace strata::graph
