#include "strata/graph/checkpoint.h"

#include <bit>
#include <cstring>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "strata/common/error.h"

namespace strata::graph {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr int kCheckpointSchemaVersion = 1;

void write_text(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw CheckpointError("cannot write " + path.string());
  out << contents;
  if (!out) throw CheckpointError("short write to " + path.string());
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw CheckpointError("cannot read " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return buffer.str();
}

json read_json(const fs::path& path) {
  try {
    return json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw CheckpointError("malformed JSON in " + path.string() + ": " + e.what());
  }
}

void write_f32(const fs::path& path, std::span<const float> data) {
  std::string bytes(data.size() * 4, '\0');
  for (std::size_t i = 0; i < data.size(); ++i) {
    auto bits = std::bit_cast<std::uint32_t>(data[i]);
    for (int b = 0; b < 4; ++b) bytes[i * 4 + b] = static_cast<char>((bits >> (8 * b)) & 0xff);
  }
  write_text(path, bytes);
}

std::vector<float> read_f32(const fs::path& path, std::size_t dimension) {
  const std::string bytes = read_file(path);
  if (bytes.size() % (dimension * 4) != 0) {
    throw CheckpointError("corrupt vector store " + path.filename().string() + ": " + std::to_string(bytes.size()) +
                          " bytes is not a multiple of d*4 = " + std::to_string(dimension * 4));
  }
  std::vector<float> data(bytes.size() / 4);
  for (std::size_t i = 0; i < data.size(); ++i) {
    std::uint32_t bits = 0;
    for (int b = 0; b < 4; ++b) bits |= static_cast<std::uint32_t>(static_cast<unsigned char>(bytes[i * 4 + b])) << (8 * b);
    data[i] = std::bit_cast<float>(bits);
  }
  return data;
}

template <typename T>
void put_optional(json& j, const char* key, const std::optional<T>& value) {
  if (value) j[key] = *value;
}

template <typename T>
std::optional<T> get_optional(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  return j[key].get<T>();
}

}  // namespace

json graph_to_json(const MemoryGraph& graph) {
  json nodes = json::array();
  for (const Node& n : graph.nodes()) {
    json j{{"id", n.id.value}, {"layer", to_string(n.layer)}, {"text", n.text}, {"conversation_id", n.conversation_id}};
    put_optional(j, "embedding_ref", n.embedding_ref);
    put_optional(j, "timestamp", n.timestamp);
    put_optional(j, "entity_type", n.entity_type);
    put_optional(j, "chunk_hash", n.chunk_hash);
    nodes.push_back(std::move(j));
  }
  json edges = json::array();
  for (const Edge& e : graph.edges()) {
    json j{{"id", e.id.value}, {"kind", to_string(e.kind)}, {"src", e.src.value}, {"dst", e.dst.value}};
    put_optional(j, "description", e.description);
    put_optional(j, "embedding_ref", e.embedding_ref);
    put_optional(j, "confidence", e.confidence);
    edges.push_back(std::move(j));
  }
  json chain = json::array();
  for (const NodeId& id : graph.episode_chain()) chain.push_back(id.value);
  return json{{"schema_version", MemoryGraph::kSchemaVersion},
              {"nodes", std::move(nodes)},
              {"edges", std::move(edges)},
              {"episode_chain", std::move(chain)}};
}

MemoryGraph graph_from_json(const json& doc) {
  if (doc.value("schema_version", -1) != MemoryGraph::kSchemaVersion) {
    throw CheckpointError("graph schema_version mismatch (expected " + std::to_string(MemoryGraph::kSchemaVersion) + ")");
  }
  MemoryGraph graph;
  try {
    for (const json& j : doc.at("nodes")) {
      Node n;
      n.id = NodeId{j.at("id").get<std::string>()};
      const auto layer = parse_layer(j.at("layer").get<std::string>());
      if (!layer) throw CheckpointError("unknown layer in node " + n.id.value);
      n.layer = *layer;
      n.text = j.at("text").get<std::string>();
      n.conversation_id = j.value("conversation_id", "");
      n.embedding_ref = get_optional<std::uint32_t>(j, "embedding_ref");
      n.timestamp = get_optional<std::string>(j, "timestamp");
      n.entity_type = get_optional<std::string>(j, "entity_type");
      n.chunk_hash = get_optional<std::string>(j, "chunk_hash");
      graph.add_node(std::move(n));
    }
    for (const json& j : doc.at("edges")) {
      Edge e;
      const auto kind = parse_edge_kind(j.at("kind").get<std::string>());
      if (!kind) throw CheckpointError("unknown edge kind");
      e.kind = *kind;
      e.src = NodeId{j.at("src").get<std::string>()};
      e.dst = NodeId{j.at("dst").get<std::string>()};
      e.description = get_optional<std::string>(j, "description");
      e.embedding_ref = get_optional<std::uint32_t>(j, "embedding_ref");
      e.confidence = get_optional<double>(j, "confidence");
      const EdgeId assigned = graph.add_edge(std::move(e));
      if (assigned.value != j.at("id").get<std::uint64_t>()) throw CheckpointError("edge ids are not sequential");
    }
    std::vector<NodeId> chain;
    for (const json& id : doc.at("episode_chain")) chain.push_back(NodeId{id.get<std::string>()});
    if (chain != graph.episode_chain()) throw CheckpointError("episode_chain disagrees with episode timestamps");
  } catch (const GraphError& e) {
    throw CheckpointError(std::string("graph.json violates graph invariants: ") + e.what());
  } catch (const json::exception& e) {
    throw CheckpointError(std::string("malformed graph.json: ") + e.what());
  }
  return graph;
}

void save_checkpoint(const Memory& memory, const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "vectors", ec);
  if (ec) throw CheckpointError("cannot create " + (dir / "vectors").string() + ": " + ec.message());

  write_text(dir / "graph.json", graph_to_json(memory.graph).dump(1) + "\n");

  json chunks = json::object();
  for (const auto& [hash, c] : memory.chunks) {
    chunks[hash] = json{{"conversation_id", c.conversation_id}, {"timestamp", c.timestamp}, {"text", c.text},
                        {"dia_ids", c.dia_ids}};
  }
  write_text(dir / "chunks.json", chunks.dump(1) + "\n");

  json hashes = json::array();
  for (const std::string& h : memory.graph.ingested_hashes()) hashes.push_back(h);
  write_text(dir / "hashes.json", hashes.dump(1) + "\n");

  json stores = json::object();
  for (index::StoreName name : index::kAllStores) {
    const auto& store = memory.stores[name];
    const std::string file = std::string(index::to_string(name)) + ".f32";
    write_f32(dir / "vectors" / file, store.data());
    stores[std::string(index::to_string(name))] = json{{"rows", store.size()}, {"file", file}};
  }
  const json manifest{{"schema_version", kCheckpointSchemaVersion},
                      {"dimension", memory.stores.dimension()},
                      {"embedder", memory.embedder_identity},
                      {"byte_order", "little"},
                      {"dtype", "float32"},
                      {"stores", std::move(stores)}};
  write_text(dir / "vectors" / "manifest.json", manifest.dump(1) + "\n");
}

Memory load_checkpoint(const fs::path& dir, std::string_view expected_embedder) {
  const json manifest = read_json(dir / "vectors" / "manifest.json");
  if (manifest.value("schema_version", -1) != kCheckpointSchemaVersion) {
    throw CheckpointError("checkpoint schema_version mismatch in " + dir.string());
  }
  const auto dimension = manifest.value("dimension", std::size_t{0});
  if (dimension == 0) throw CheckpointError("manifest lacks a positive dimension");

  Memory memory(dimension);
  memory.embedder_identity = manifest.value("embedder", "");
  if (!expected_embedder.empty() && memory.embedder_identity != expected_embedder) {
    spdlog::warn("checkpoint {} was built with embedder '{}' but '{}' is configured", dir.string(),
                 memory.embedder_identity, expected_embedder);
  }

  memory.graph = graph_from_json(read_json(dir / "graph.json"));

  for (const json& h : read_json(dir / "hashes.json")) memory.graph.record_hash(h.get<std::string>());

  const json chunks = read_json(dir / "chunks.json");
  for (const auto& [hash, c] : chunks.items()) {
    memory.chunks[hash] = ChunkRecord{c.value("conversation_id", ""), c.value("timestamp", ""), c.value("text", ""),
                                      c.value("dia_ids", std::vector<std::string>{})};
  }

  for (index::StoreName name : index::kAllStores) {
    const std::string key(index::to_string(name));
    const json& entry = manifest.at("stores").at(key);
    auto store = index::FlatVectorStore::from_rows(key, dimension,
                                                   read_f32(dir / "vectors" / entry.at("file").get<std::string>(), dimension));
    if (store.size() != entry.at("rows").get<std::size_t>()) {
      throw CheckpointError("corrupt vector store " + key + ": row count disagrees with manifest");
    }
    memory.stores.reset(name, std::move(store));
  }

  auto claim = [&](index::StoreName name, std::uint32_t row, std::string owner) {
    auto& store = memory.stores[name];
    if (row >= store.size()) {
      throw CheckpointError("embedding_ref " + std::to_string(row) + " out of range for " + store.name());
    }
    if (!store.owner(row).empty()) throw CheckpointError("row claimed twice in " + store.name());
    store.set_owner(row, std::move(owner));
  };
  for (const Node& n : memory.graph.nodes()) {
    if (n.embedding_ref) claim(index::store_for(n.layer), *n.embedding_ref, n.id.value);
  }
  for (const Edge& e : memory.graph.edges()) {
    if (e.embedding_ref) claim(index::store_for(e.kind), *e.embedding_ref, edge_owner(e.id));
  }
  for (index::StoreName name : index::kAllStores) {
    const auto& store = memory.stores[name];
    for (std::uint32_t r = 0; r < store.size(); ++r) {
      if (store.owner(r).empty()) throw CheckpointError("orphan row " + std::to_string(r) + " in " + store.name());
    }
  }
  return memory;
}

}  // namespace strata::graph
