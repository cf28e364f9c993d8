#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "strata/ingest/conversation.h"

namespace strata::llm {
class ChatClient;
}

namespace strata::ingest {

struct ExtractedEntity {
  std::string name;
  std::string entity_type;

  friend bool operator==(const ExtractedEntity&, const ExtractedEntity&) = default;
};

struct ExtractedFacetPoint {
  std::string content;
  std::optional<std::string> related_entity_name;
  std::optional<std::string> timestamp_text;

  friend bool operator==(const ExtractedFacetPoint&, const ExtractedFacetPoint&) = default;
};

struct ExtractedFacet {
  std::string theme;
  std::vector<std::size_t> facet_point_indices;

  friend bool operator==(const ExtractedFacet&, const ExtractedFacet&) = default;
};

struct TemporalInfo {
  std::string subject;
  std::string time_expression;
  std::optional<std::string> normalized_time;
  std::string relation;

  friend bool operator==(const TemporalInfo&, const TemporalInfo&) = default;
};

struct ExtractionResult {
  std::string episode_summary;
  std::vector<ExtractedEntity> entities;
  std::vector<ExtractedFacetPoint> facet_points;
  std::vector<ExtractedFacet> facets;
  std::vector<TemporalInfo> temporal_info;

  friend bool operator==(const ExtractionResult&, const ExtractionResult&) = default;
};

inline constexpr std::string_view kEntityTypes[] = {"person", "organization", "place", "concept", "event", "other"};

// Validates and converts. Throws InputError when a required key is missing
// or mistyped, the summary is blank, a facet index is out of range, or a
// normalized_time is not ISO-8601. Entity types are lowercased; unknown
// ones become "other". Entities with blank names are dropped.
ExtractionResult parse_extraction(const nlohmann::json& doc);

// parse_extraction over the first JSON object found in a model reply.
ExtractionResult parse_extraction_reply(std::string_view reply);

nlohmann::json to_json(const ExtractionResult& result);

class Extractor {
 public:
  virtual ~Extractor() = default;
  virtual std::string identity() const = 0;
  // Returns a schema-valid result or throws (InputError / BackendError).
  virtual ExtractionResult extract(const RawChunk& chunk) = 0;
};

// Renders the extraction prompt over the chunk text.
class LlmExtractor final : public Extractor {
 public:
  explicit LlmExtractor(llm::ChatClient& client) : client_(client) {}
  std::string identity() const override;
  ExtractionResult extract(const RawChunk& chunk) override;

 private:
  llm::ChatClient& client_;
};

// Pre-extracted records keyed by chunk content hash.
class FileExtractor final : public Extractor {
 public:
  explicit FileExtractor(std::map<std::string, ExtractionResult> records) : records_(std::move(records)) {}
  static FileExtractor load(const std::filesystem::path& path);

  std::string identity() const override { return "pre-extracted"; }
  ExtractionResult extract(const RawChunk& chunk) override;

 private:
  std::map<std::string, ExtractionResult> records_;
};

// Summary and speaker entities only; the other fields stay empty.
class FallbackExtractor final : public Extractor {
 public:
  std::string identity() const override { return "fallback"; }
  ExtractionResult extract(const RawChunk& chunk) override;
};

}  // namespace strata::ingest
