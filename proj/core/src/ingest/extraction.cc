#include "strata/ingest/extraction.h"

#include <algorithm>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "strata/common/error.h"
#include "strata/common/json_extract.h"
#include "strata/common/text.h"
#include "strata/common/time.h"
#include "strata/llm/chat_client.h"
#include "strata/llm/prompts.h"

namespace strata::ingest {
namespace {

using nlohmann::json;

const json& require(const json& j, const char* key, json::value_t type) {
  if (!j.is_object() || !j.contains(key)) throw InputError(std::string("extraction lacks '") + key + "'");
  const json& v = j[key];
  if (v.type() != type) throw InputError(std::string("extraction field '") + key + "' has the wrong type");
  return v;
}

std::optional<std::string> optional_string(const json& j, const char* key) {
  if (!j.contains(key) || j[key].is_null()) return std::nullopt;
  if (!j[key].is_string()) throw InputError(std::string("field '") + key + "' must be a string or null");
  auto s = text::trim(j[key].get<std::string>());
  if (s.empty()) return std::nullopt;
  return s;
}

std::string required_string(const json& j, const char* key) {
  if (!j.is_object() || !j.contains(key) || !j[key].is_string()) {
    throw InputError(std::string("field '") + key + "' must be a string");
  }
  return j[key].get<std::string>();
}

}  // namespace

ExtractionResult parse_extraction(const json& doc) {
  if (!doc.is_object()) throw InputError("extraction result must be a JSON object");
  ExtractionResult r;
  r.episode_summary = text::trim(require(doc, "episode_summary", json::value_t::string).get<std::string>());
  if (r.episode_summary.empty()) throw InputError("episode_summary is blank");

  for (const json& e : require(doc, "entities", json::value_t::array)) {
    ExtractedEntity entity{text::trim(required_string(e, "name")), text::to_lower_ascii(text::trim(required_string(e, "entity_type")))};
    if (entity.name.empty()) continue;
    if (std::find(std::begin(kEntityTypes), std::end(kEntityTypes), entity.entity_type) == std::end(kEntityTypes)) {
      entity.entity_type = "other";
    }
    r.entities.push_back(std::move(entity));
  }
  for (const json& fp : require(doc, "facet_points", json::value_t::array)) {
    ExtractedFacetPoint point{text::trim(required_string(fp, "content")), optional_string(fp, "related_entity_name"),
                              optional_string(fp, "timestamp_text")};
    if (point.content.empty()) throw InputError("facet_point with blank content");
    r.facet_points.push_back(std::move(point));
  }
  for (const json& f : require(doc, "facets", json::value_t::array)) {
    ExtractedFacet facet{text::trim(required_string(f, "theme")), {}};
    if (!f.contains("facet_point_indices") || !f["facet_point_indices"].is_array()) {
      throw InputError("facet lacks facet_point_indices");
    }
    for (const json& i : f["facet_point_indices"]) {
      if (!i.is_number_integer() || i.get<long long>() < 0 ||
          static_cast<std::size_t>(i.get<long long>()) >= r.facet_points.size()) {
        throw InputError("facet_point_indices entry " + i.dump() + " is out of range");
      }
      facet.facet_point_indices.push_back(i.get<std::size_t>());
    }
    if (facet.theme.empty()) throw InputError("facet with blank theme");
    r.facets.push_back(std::move(facet));
  }
  for (const json& t : require(doc, "temporal_info", json::value_t::array)) {
    TemporalInfo info{text::trim(required_string(t, "subject")), text::trim(required_string(t, "time_expression")),
                      optional_string(t, "normalized_time"), t.contains("relation") && t["relation"].is_string()
                                                                  ? t["relation"].get<std::string>()
                                                                  : std::string()};
    if (info.normalized_time && !parse_iso8601(*info.normalized_time)) {
      throw InputError("normalized_time '" + *info.normalized_time + "' is not ISO-8601");
    }
    r.temporal_info.push_back(std::move(info));
  }
  return r;
}

ExtractionResult parse_extraction_reply(std::string_view reply) {
  auto doc = first_json(reply, '{');
  if (!doc) throw InputError("no JSON object in extraction reply");
  return parse_extraction(*doc);
}

json to_json(const ExtractionResult& r) {
  auto opt = [](const std::optional<std::string>& s) { return s ? json(*s) : json(nullptr); };
  json entities = json::array();
  for (const auto& e : r.entities) entities.push_back({{"name", e.name}, {"entity_type", e.entity_type}});
  json points = json::array();
  for (const auto& p : r.facet_points) {
    points.push_back({{"content", p.content},
                      {"related_entity_name", opt(p.related_entity_name)},
                      {"timestamp_text", opt(p.timestamp_text)}});
  }
  json facets = json::array();
  for (const auto& f : r.facets) facets.push_back({{"theme", f.theme}, {"facet_point_indices", f.facet_point_indices}});
  json temporal = json::array();
  for (const auto& t : r.temporal_info) {
    temporal.push_back({{"subject", t.subject},
                        {"time_expression", t.time_expression},
                        {"normalized_time", opt(t.normalized_time)},
                        {"relation", t.relation}});
  }
  return json{{"episode_summary", r.episode_summary},
              {"entities", std::move(entities)},
              {"facet_points", std::move(points)},
              {"facets", std::move(facets)},
              {"temporal_info", std::move(temporal)}};
}

std::string LlmExtractor::identity() const { return "llm:" + client_.identity(); }

ExtractionResult LlmExtractor::extract(const RawChunk& chunk) {
  const std::string prompt = llm::render(llm::prompt_template(llm::kExtractionPrompt), {{"chunk", chunk.text}});
  return parse_extraction_reply(client_.complete({}, prompt));
}

FileExtractor FileExtractor::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open pre-extracted file " + path.string());
  const json doc = json::parse(in, nullptr, false);
  if (!doc.is_object()) throw InputError(path.string() + " must map content hashes to extraction records");
  std::map<std::string, ExtractionResult> records;
  for (const auto& [hash, record] : doc.items()) {
    try {
      records.emplace(hash, parse_extraction(record));
    } catch (const InputError& e) {
      throw InputError("pre-extracted record " + hash + ": " + e.what());
    }
  }
  return FileExtractor(std::move(records));
}

ExtractionResult FileExtractor::extract(const RawChunk& chunk) {
  auto it = records_.find(chunk.content_hash);
  if (it == records_.end()) throw InputError("no pre-extracted record for chunk " + chunk.content_hash.substr(0, 12));
  return it->second;
}

ExtractionResult FallbackExtractor::extract(const RawChunk& chunk) {
  ExtractionResult r;
  std::string body;
  std::set<std::string> seen;
  std::size_t start = 0;
  bool header = true;
  while (start < chunk.text.size()) {
    auto end = chunk.text.find('\n', start);
    if (end == std::string::npos) end = chunk.text.size();
    const std::string line = text::trim(std::string_view(chunk.text).substr(start, end - start));
    start = end + 1;
    if (header && !line.empty() && line.front() == '[' && line.back() == ']') {
      header = false;
      continue;
    }
    header = false;
    if (line.empty()) continue;
    body += (body.empty() ? "" : " ") + line;
    const auto colon = line.find(": ");
    if (colon != std::string::npos && colon > 0 && colon < 64) {
      const std::string speaker = text::trim(line.substr(0, colon));
      if (seen.insert(text::normalize_name(speaker)).second) r.entities.push_back({speaker, "person"});
    }
  }
  r.episode_summary = text::collapse_whitespace(body);
  if (r.episode_summary.empty()) throw InputError("chunk has no content");
  return r;
}

}  // namespace strata::ingest
