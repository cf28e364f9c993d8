#include "strata/routing/router.h"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "strata/common/error.h"
#include "strata/common/json_extract.h"
#include "strata/llm/chat_client.h"
#include "strata/llm/prompts.h"

namespace strata::routing {

using nlohmann::json;

namespace {

// Float32 embeddings put "exact" boundary cosines a few ulps either side of
// the threshold; a gate only commits when it clears the bound by more than this.
constexpr double kGateTolerance = 1e-6;

constexpr std::array<IntentLabel, 4> kScoredLabels{IntentLabel::kTemporal, IntentLabel::kCausal,
                                                   IntentLabel::kMultiHop, IntentLabel::kEntityCentric};

}  // namespace

std::string_view to_string(Tier tier) {
  switch (tier) {
    case Tier::kKeywordGated: return "keyword_gated";
    case Tier::kPrototype: return "prototype";
    case Tier::kLlm: return "llm";
    case Tier::kNone: return "none";
  }
  return "unknown";
}

std::string_view to_string(IntentMode mode) {
  switch (mode) {
    case IntentMode::kOff: return "off";
    case IntentMode::kLlm: return "llm";
    case IntentMode::kHybrid: return "hybrid";
  }
  return "unknown";
}

std::optional<IntentMode> parse_intent_mode(std::string_view s) {
  if (s == "off") return IntentMode::kOff;
  if (s == "llm" || s == "llm-only") return IntentMode::kLlm;
  if (s == "hybrid") return IntentMode::kHybrid;
  return std::nullopt;
}

json RoutingResult::to_json() const {
  json j{{"labels", labels.to_string()}, {"tier", to_string(tier)}, {"llm_calls", llm_calls}, {"degraded", degraded}};
  if (raw_scores) j["raw_scores"] = *raw_scores;
  if (!error.empty()) j["error"] = error;
  return j;
}

std::optional<IntentSet> keyword_gate(std::string_view query, const KeywordBank& bank) {
  const std::string q(query);
  IntentSet hits;
  for (const auto& rule : bank.rules) {
    if (!hits.contains(rule.label) && std::regex_search(q, rule.regex)) hits.add(rule.label);
  }
  if (hits.empty()) return std::nullopt;
  return hits;
}

std::optional<IntentSet> prototype_match(std::span<const float> q, const PrototypeBank& bank) {
  if (bank.prototypes.empty()) return std::nullopt;
  std::size_t top = 0;
  double top_sim = -2.0;
  std::vector<double> sims(bank.prototypes.size());
  for (std::size_t i = 0; i < bank.prototypes.size(); ++i) {
    sims[i] = index::dot(q, bank.prototypes[i].embedding);
    if (sims[i] > top_sim) {
      top_sim = sims[i];
      top = i;
    }
  }
  const IntentLabel label = bank.prototypes[top].label;
  std::optional<double> runner_up;
  for (std::size_t i = 0; i < sims.size(); ++i) {
    if (bank.prototypes[i].label != label && (!runner_up || sims[i] > *runner_up)) runner_up = sims[i];
  }
  if (!(top_sim > bank.threshold + kGateTolerance)) return std::nullopt;
  if (runner_up && !(top_sim - *runner_up > bank.margin + kGateTolerance)) return std::nullopt;
  return IntentSet{label};
}

std::optional<std::map<std::string, double>> parse_intent_scores(std::string_view reply) {
  const auto doc = first_json(reply, '{');
  if (!doc) return std::nullopt;
  std::map<std::string, double> scores;
  for (IntentLabel l : kScoredLabels) {
    const std::string key(to_string(l));
    if (!doc->contains(key) || !(*doc)[key].is_number()) return std::nullopt;
    const double v = (*doc)[key].get<double>();
    if (v < 0.0 || v > 1.0) return std::nullopt;
    scores[key] = v;
  }
  return scores;
}

RoutingResult llm_classify(std::string_view query, llm::ChatClient& client) {
  RoutingResult r;
  r.tier = Tier::kLlm;
  r.llm_calls = 1;
  std::string reply;
  try {
    reply = client.complete(llm::prompt_template(llm::kIntentSystemPrompt),
                            llm::render(llm::prompt_template(llm::kIntentUserPrompt), {{"query", query}}));
  } catch (const BackendError& e) {
    r.degraded = true;
    r.error = e.what();
    return r;
  }
  const auto scores = parse_intent_scores(reply);
  if (!scores) {
    r.degraded = true;
    r.error = "unparsable intent scores";
    return r;
  }
  r.raw_scores = scores;
  IntentSet labels;
  bool any_signal = false;
  for (IntentLabel l : kScoredLabels) {
    const double v = scores->at(std::string(to_string(l)));
    if (v >= kLlmCommitThreshold) labels.add(l);
    if (v >= kGeneralCeiling) any_signal = true;
  }
  r.labels = any_signal ? resolve_labels(labels) : IntentSet::general();
  return r;
}

Router::Router(IntentMode mode, const IntentBank* bank, index::Embedder* embedder, llm::ChatClient* client)
    : mode_(mode), bank_(bank), embedder_(embedder), client_(client) {
  if (mode_ != IntentMode::kOff && !client_) throw InputError("intent routing needs a chat client");
  if (mode_ == IntentMode::kHybrid && (!bank_ || !embedder_)) {
    throw InputError("hybrid routing needs an intent bank and an embedder");
  }
}

RoutingResult Router::route(std::string_view query, std::span<const float> query_embedding) {
  if (mode_ == IntentMode::kOff) return RoutingResult{};
  if (mode_ == IntentMode::kHybrid) {
    ++keyword_calls_;
    if (auto hit = keyword_gate(query, bank_->keywords)) {
      RoutingResult r;
      r.tier = Tier::kKeywordGated;
      r.labels = resolve_labels(*hit);
      return r;
    }
    ++prototype_calls_;
    index::Embedding owned;
    if (query_embedding.empty()) {
      owned = index::embed_and_normalize(*embedder_, query);
      query_embedding = owned;
    }
    if (auto hit = prototype_match(query_embedding, bank_->prototypes)) {
      RoutingResult r;
      r.tier = Tier::kPrototype;
      r.labels = resolve_labels(*hit);
      return r;
    }
  }
  ++llm_calls_;
  return llm_classify(query, *client_);
}

}  // namespace strata::routing
