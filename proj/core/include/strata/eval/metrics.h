#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "strata/graph/checkpoint.h"

namespace strata::eval {

struct QueryRecord {
  std::string id;
  std::string conversation_id;
  std::string question;
  std::string gold_answer;
  std::string category;  // single_hop | multi_hop | temporal | open_domain
  std::vector<std::string> evidence;  // dialogue ids

  nlohmann::json to_json() const;
};

// Either a list of records, or LoCoMo samples ({sample_id, qa: [...]}) whose
// integer categories map 1 multi_hop, 2 temporal, 3 open_domain,
// 4 single_hop. Category 5 (adversarial) is skipped.
std::vector<QueryRecord> parse_qa(const nlohmann::json& doc);
std::vector<QueryRecord> load_qa(const std::filesystem::path& path);

// dia_id -> Episode id through the chunk records.
std::map<std::string, std::string> evidence_index(const graph::Memory& memory);

// Gold episodes for a record, first-seen order, deduplicated. An entry such
// as "D1:3; D1:5" counts every part. Unknown ids land in `unresolved`.
std::vector<std::string> resolve_evidence(const std::map<std::string, std::string>& index,
                                          std::span<const std::string> evidence,
                                          std::vector<std::string>* unresolved = nullptr);

// |top-k of ranked ∩ gold| / |gold|; nullopt with no gold episodes.
std::optional<double> evidence_recall(std::span<const std::string> ranked, std::span<const std::string> gold,
                                      std::size_t k);

struct CategoryMetrics {
  std::size_t questions = 0;
  std::size_t judged = 0;
  std::size_t correct = 0;
  std::size_t unjudged = 0;
  std::size_t degraded = 0;
  double judge_score = 0.0;              // correct / judged
  double context_tokens_per_query = 0.0;  // mean over all questions
  double score_per_1k_tokens = 0.0;
  double llm_calls_per_query = 0.0;      // retrieval-time calls
  std::size_t er_questions = 0;          // questions with resolvable evidence
  std::map<std::size_t, double> evidence_recall;  // K -> mean

  nlohmann::json to_json() const;
};

struct RunMetrics {
  CategoryMetrics overall;
  std::map<std::string, CategoryMetrics> by_category;

  nlohmann::json to_json() const;
};

// Aggregates per-question log lines. The same function produces the run
// summary, so a summary regenerated from the log matches exactly.
RunMetrics metrics_from_log(std::span<const nlohmann::json> lines, std::span<const std::size_t> er_k);

}  // namespace strata::eval
