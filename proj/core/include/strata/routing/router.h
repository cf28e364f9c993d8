#pragma once

#include <atomic>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include <nlohmann/json_fwd.hpp>

#include "strata/routing/intent.h"

namespace strata::llm {
class ChatClient;
}

namespace strata::routing {

enum class Tier : std::uint8_t { kKeywordGated, kPrototype, kLlm, kNone };
enum class IntentMode : std::uint8_t { kOff, kLlm, kHybrid };

std::string_view to_string(Tier tier);
std::string_view to_string(IntentMode mode);
std::optional<IntentMode> parse_intent_mode(std::string_view s);

// LLM scores at or above this commit a label; all below kGeneralCeiling
// means no recognisable intent.
inline constexpr double kLlmCommitThreshold = 0.5;
inline constexpr double kGeneralCeiling = 0.3;

struct RoutingResult {
  IntentSet labels = IntentSet::general();
  Tier tier = Tier::kNone;
  int llm_calls = 0;
  std::optional<std::map<std::string, double>> raw_scores;
  bool degraded = false;
  std::string error;

  nlohmann::json to_json() const;
};

// Union of labels with any pattern matching on word boundaries.
std::optional<IntentSet> keyword_gate(std::string_view query, const KeywordBank& bank);

// Top-1 prototype label when its cosine clears the threshold and beats the
// best prototype of a different label by more than the margin.
std::optional<IntentSet> prototype_match(std::span<const float> query_embedding, const PrototypeBank& bank);

// Scores parsed from a classifier reply (first JSON object, four keys in
// [0,1]); nullopt on any parse problem.
std::optional<std::map<std::string, double>> parse_intent_scores(std::string_view reply);

// One chat call. Transport and parse failures give {General}, tier llm,
// degraded.
RoutingResult llm_classify(std::string_view query, llm::ChatClient& client);

// Keeps per-tier invocation counts for instrumentation.
class Router {
 public:
  Router(IntentMode mode, const IntentBank* bank, index::Embedder* embedder, llm::ChatClient* client);

  // `query_embedding` may be passed to avoid embedding twice.
  RoutingResult route(std::string_view query, std::span<const float> query_embedding = {});

  IntentMode mode() const { return mode_; }
  std::uint64_t keyword_invocations() const { return keyword_calls_; }
  std::uint64_t prototype_invocations() const { return prototype_calls_; }
  std::uint64_t llm_invocations() const { return llm_calls_; }

 private:
  IntentMode mode_;
  const IntentBank* bank_;
  index::Embedder* embedder_;
  llm::ChatClient* client_;
  std::atomic<std::uint64_t> keyword_calls_{0};
  std::atomic<std::uint64_t> prototype_calls_{0};
  std::atomic<std::uint64_t> llm_calls_{0};
};

}  // namespace strata::routing
