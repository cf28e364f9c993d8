#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace strata::ingest {

struct Turn {
  std::string speaker;
  std::string text;
  std::string dia_id;
};

struct Session {
  std::string timestamp;  // as written in the source (header form or ISO)
  std::vector<Turn> turns;
};

struct Conversation {
  std::string conversation_id;
  std::vector<Session> sessions;
};

struct RawChunk {
  std::string conversation_id;
  std::string header_timestamp;  // ISO-8601
  std::string text;
  std::string content_hash;  // SHA-256 hex of text
  std::vector<std::string> dia_ids;
};

// Builds a chunk and computes its content hash.
RawChunk make_chunk(std::string conversation_id, std::string header_timestamp, std::string text,
                    std::vector<std::string> dia_ids = {});

bool hash_matches(const RawChunk& chunk);

// Accepts {"conversation_id", "sessions": [{"timestamp", "turns": [...]}]}
// and the LoCoMo layout ({"sample_id", "conversation": {"session_N",
// "session_N_date_time", ...}}). Throws InputError on anything else.
Conversation parse_conversation(const nlohmann::json& doc);
Conversation load_conversation(const std::filesystem::path& path);
// A file may hold one conversation or a JSON array of them.
std::vector<Conversation> load_conversations(const std::filesystem::path& path);

// One chunk per session: "[<timestamp as written>]" followed by one
// "speaker: text" line per turn. Chunks come back ordered by header
// timestamp (stable for equal times). Throws InputError when a session
// timestamp cannot be normalised.
std::vector<RawChunk> chunk_conversation(const Conversation& conversation);

nlohmann::json to_json(const Conversation& conversation);

}  // namespace strata::ingest
