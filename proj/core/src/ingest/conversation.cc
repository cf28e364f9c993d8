#include "strata/ingest/conversation.h"

#include <algorithm>
#include <fstream>
#include <regex>

#include <nlohmann/json.hpp>

#include "strata/common/error.h"
#include "strata/common/hash.h"
#include "strata/common/time.h"

namespace strata::ingest {
namespace {

using nlohmann::json;

std::string require_string(const json& j, const char* key, const std::string& where) {
  if (!j.contains(key) || !j[key].is_string()) {
    throw InputError(where + ": missing string field '" + key + "'");
  }
  return j[key].get<std::string>();
}

Turn parse_turn(const json& t, const std::string& where) {
  Turn turn;
  turn.speaker = require_string(t, "speaker", where);
  turn.text = require_string(t, "text", where);
  if (t.contains("dia_id") && t["dia_id"].is_string()) turn.dia_id = t["dia_id"].get<std::string>();
  return turn;
}

Conversation parse_locomo(const json& doc) {
  Conversation conv;
  conv.conversation_id = doc.value("sample_id", "");
  const json& c = doc.at("conversation");
  static const std::regex kSession(R"(^session_(\d+)$)");
  std::vector<std::pair<int, std::string>> keys;
  for (const auto& [key, value] : c.items()) {
    std::smatch m;
    if (std::regex_match(key, m, kSession) && value.is_array()) keys.emplace_back(std::stoi(m[1].str()), key);
  }
  std::sort(keys.begin(), keys.end());
  for (const auto& [n, key] : keys) {
    Session s;
    s.timestamp = require_string(c, (key + "_date_time").c_str(), "conversation " + conv.conversation_id);
    for (const auto& t : c[key]) s.turns.push_back(parse_turn(t, key));
    conv.sessions.push_back(std::move(s));
  }
  return conv;
}

}  // namespace

RawChunk make_chunk(std::string conversation_id, std::string header_timestamp, std::string text,
                    std::vector<std::string> dia_ids) {
  RawChunk chunk{std::move(conversation_id), std::move(header_timestamp), std::move(text), "", std::move(dia_ids)};
  chunk.content_hash = sha256_hex(chunk.text);
  return chunk;
}

bool hash_matches(const RawChunk& chunk) { return sha256_hex(chunk.text) == chunk.content_hash; }

Conversation parse_conversation(const json& doc) {
  if (!doc.is_object()) throw InputError("conversation must be a JSON object");
  if (doc.contains("conversation") && doc["conversation"].is_object()) return parse_locomo(doc);
  Conversation conv;
  conv.conversation_id = require_string(doc, "conversation_id", "conversation");
  if (!doc.contains("sessions") || !doc["sessions"].is_array()) {
    throw InputError("conversation " + conv.conversation_id + ": 'sessions' must be an array");
  }
  for (const auto& s : doc["sessions"]) {
    Session session;
    session.timestamp = require_string(s, "timestamp", "session");
    if (!s.contains("turns") || !s["turns"].is_array()) throw InputError("session lacks a 'turns' array");
    for (const auto& t : s["turns"]) session.turns.push_back(parse_turn(t, "turn"));
    conv.sessions.push_back(std::move(session));
  }
  return conv;
}

std::vector<Conversation> load_conversations(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open conversation file " + path.string());
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw InputError(path.string() + " is not valid JSON");
  std::vector<Conversation> out;
  if (doc.is_array()) {
    for (const auto& c : doc) out.push_back(parse_conversation(c));
  } else {
    out.push_back(parse_conversation(doc));
  }
  return out;
}

Conversation load_conversation(const std::filesystem::path& path) {
  auto all = load_conversations(path);
  if (all.size() != 1) throw InputError(path.string() + " holds " + std::to_string(all.size()) + " conversations");
  return std::move(all.front());
}

std::vector<RawChunk> chunk_conversation(const Conversation& conversation) {
  std::vector<std::pair<std::int64_t, RawChunk>> keyed;
  for (const Session& s : conversation.sessions) {
    if (s.turns.empty()) continue;
    const auto iso = normalize_header_timestamp(s.timestamp);
    const auto span = iso ? parse_iso8601(*iso) : std::nullopt;
    if (!span) throw InputError("unrecognised session timestamp '" + s.timestamp + "'");
    std::string text = "[" + s.timestamp + "]";
    std::vector<std::string> dia_ids;
    for (const Turn& t : s.turns) {
      text += "\n" + t.speaker + ": " + t.text;
      if (!t.dia_id.empty()) dia_ids.push_back(t.dia_id);
    }
    keyed.emplace_back(span->begin, make_chunk(conversation.conversation_id, *iso, std::move(text), std::move(dia_ids)));
  }
  std::stable_sort(keyed.begin(), keyed.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<RawChunk> out;
  out.reserve(keyed.size());
  for (auto& [t, chunk] : keyed) out.push_back(std::move(chunk));
  return out;
}

json to_json(const Conversation& conversation) {
  json sessions = json::array();
  for (const Session& s : conversation.sessions) {
    json turns = json::array();
    for (const Turn& t : s.turns) turns.push_back({{"speaker", t.speaker}, {"text", t.text}, {"dia_id", t.dia_id}});
    sessions.push_back({{"timestamp", s.timestamp}, {"turns", std::move(turns)}});
  }
  return json{{"conversation_id", conversation.conversation_id}, {"sessions", std::move(sessions)}};
}

}  // namespace strata::ingest
