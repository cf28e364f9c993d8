#include <cmath>

#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "strata/common/error.h"
#include "strata/llm/chat_client.h"
#include "strata/routing/intent.h"
#include "strata/routing/router.h"
#include "support.h"

using namespace strata;
using namespace strata::routing;

namespace {

std::vector<float> axis(std::size_t d, std::size_t i, double w = 1.0) {
  std::vector<float> v(d, 0.0f);
  v[i] = static_cast<float>(w);
  return v;
}

// Unit vector with cosine c against e0, the remainder on axis `other`.
std::vector<float> toward_e0(std::size_t d, double c, std::size_t other) {
  std::vector<float> v(d, 0.0f);
  v[0] = static_cast<float>(c);
  v[other] = static_cast<float>(std::sqrt(1.0 - c * c));
  return v;
}

PrototypeBank two_label_bank(double top, double runner) {
  PrototypeBank b;
  b.prototypes.push_back({IntentLabel::kTemporal, "t", toward_e0(6, top, 1)});
  b.prototypes.push_back({IntentLabel::kCausal, "c", toward_e0(6, runner, 2)});
  return b;
}

class Counting final : public llm::ChatClient {
 public:
  std::string reply;
  std::string identity() const override { return "counting"; }

 protected:
  std::string do_complete(std::string_view, std::string_view) override { return reply; }
};

}  // namespace

TEST(IntentSet, BitsAndNames) {
  IntentSet s{IntentLabel::kTemporal, IntentLabel::kCausal};
  EXPECT_TRUE(s.contains(IntentLabel::kCausal));
  EXPECT_FALSE(s.contains(IntentLabel::kMultiHop));
  EXPECT_EQ(s.to_string(), "temporal+causal");
  EXPECT_EQ(IntentSet::general().to_string(), "general");
  EXPECT_EQ(IntentSet::from_bits(0xff).bits(), 0x1f);
  for (IntentLabel l : kAllLabels) EXPECT_EQ(parse_label(to_string(l)), l);
}

TEST(IntentSet, ResolveLabels) {
  EXPECT_EQ(resolve_labels({}), IntentSet::general());
  EXPECT_EQ(resolve_labels({IntentLabel::kMultiHop, IntentLabel::kEntityCentric}), IntentSet{IntentLabel::kMultiHop});
  EXPECT_EQ(resolve_labels({IntentLabel::kGeneral, IntentLabel::kTemporal}), IntentSet{IntentLabel::kTemporal});
  for (unsigned bits = 0; bits < 32; ++bits) {
    const IntentSet r = resolve_labels(IntentSet::from_bits(static_cast<std::uint8_t>(bits)));
    EXPECT_FALSE(r.empty());
    EXPECT_FALSE(r.contains(IntentLabel::kMultiHop) && r.contains(IntentLabel::kEntityCentric));
    EXPECT_TRUE(!r.contains(IntentLabel::kGeneral) || r == IntentSet::general());
  }
}

TEST(KeywordGate, MatchesOnWordBoundaries) {
  index::HashEmbedder e(16);
  const IntentBank bank = default_bank(e);
  EXPECT_EQ(keyword_gate("When did Caroline go?", bank.keywords), IntentSet{IntentLabel::kTemporal});
  EXPECT_EQ(keyword_gate("WHY did she quit?", bank.keywords), IntentSet{IntentLabel::kCausal});
  EXPECT_EQ(keyword_gate("Why did she move after the wedding?", bank.keywords),
            (IntentSet{IntentLabel::kTemporal, IntentLabel::kCausal}));
  EXPECT_FALSE(keyword_gate("Whenever painting helps", bank.keywords));
  EXPECT_FALSE(keyword_gate("Tell me about the garden", bank.keywords));
}

TEST(DefaultBank, LoadsPrototypes) {
  index::HashEmbedder e(32);
  const IntentBank bank = default_bank(e);
  EXPECT_GT(bank.keywords.count(IntentLabel::kTemporal), 0u);
  EXPECT_GT(bank.keywords.count(IntentLabel::kCausal), 0u);
  for (IntentLabel l : {IntentLabel::kTemporal, IntentLabel::kCausal, IntentLabel::kMultiHop,
                        IntentLabel::kEntityCentric}) {
    EXPECT_GT(bank.prototypes.count(l), 0u) << to_string(l);
  }
  for (const auto& p : bank.prototypes.prototypes) EXPECT_EQ(p.embedding.size(), 32u);
  EXPECT_DOUBLE_EQ(bank.prototypes.threshold, 0.55);
  EXPECT_DOUBLE_EQ(bank.prototypes.margin, 0.10);
}

TEST(LoadBank, ValidatesManifestCounts) {
  index::HashEmbedder e(8);
  nlohmann::json doc = nlohmann::json::parse(R"({
    "keywords": {"temporal": ["when"]},
    "prototypes": [{"label": "causal", "text": "why did it happen"}],
    "manifest": {"keywords": {"temporal": 1}, "prototypes": {"causal": 1}}
  })");
  EXPECT_NO_THROW(load_bank(doc, e));
  doc["manifest"]["prototypes"]["causal"] = 2;
  EXPECT_THROW(load_bank(doc, e), InputError);
  nlohmann::json bad = nlohmann::json::parse(R"({"keywords": {"sideways": ["x"]}, "prototypes": []})");
  EXPECT_THROW(load_bank(bad, e), InputError);
}

TEST(PrototypeMatch, ThresholdIsStrict) {
  const auto q = axis(6, 0);
  EXPECT_FALSE(prototype_match(q, two_label_bank(0.55, 0.0)));
  EXPECT_TRUE(prototype_match(q, two_label_bank(0.5501, 0.0)));
}

TEST(PrototypeMatch, MarginIsStrict) {
  const auto q = axis(6, 0);
  EXPECT_FALSE(prototype_match(q, two_label_bank(0.80, 0.70)));
  EXPECT_EQ(prototype_match(q, two_label_bank(0.80, 0.6999)), IntentSet{IntentLabel::kTemporal});
}

TEST(PrototypeMatch, RunnerUpIsBestOtherLabel) {
  const auto q = axis(6, 0);
  PrototypeBank b;
  b.prototypes.push_back({IntentLabel::kTemporal, "a", toward_e0(6, 0.9, 1)});
  b.prototypes.push_back({IntentLabel::kTemporal, "b", toward_e0(6, 0.88, 2)});
  b.prototypes.push_back({IntentLabel::kCausal, "c", toward_e0(6, 0.5, 3)});
  EXPECT_EQ(prototype_match(q, b), IntentSet{IntentLabel::kTemporal});
  b.prototypes.pop_back();
  EXPECT_EQ(prototype_match(q, b), IntentSet{IntentLabel::kTemporal});
  EXPECT_FALSE(prototype_match(q, PrototypeBank{}));
}

TEST(ParseIntentScores, RequiresAllFourInRange) {
  const auto ok = parse_intent_scores(
      R"(Sure: {"temporal": 0.9, "causal": 0.1, "multi_hop": 0.0, "entity_centric": 0.4})");
  ASSERT_TRUE(ok);
  EXPECT_DOUBLE_EQ(ok->at("temporal"), 0.9);
  EXPECT_FALSE(parse_intent_scores(R"({"temporal": 0.9, "causal": 0.1, "multi_hop": 0.0})"));
  EXPECT_FALSE(parse_intent_scores(R"({"temporal": 1.9, "causal": 0.1, "multi_hop": 0.0, "entity_centric": 0})"));
  EXPECT_FALSE(parse_intent_scores("nothing"));
}

TEST(LlmClassify, CommitsAtHalfAndFallsBackToGeneral) {
  Counting c;
  c.reply = R"({"temporal": 0.5, "causal": 0.49, "multi_hop": 0.7, "entity_centric": 0.8})";
  auto r = llm_classify("q", c);
  EXPECT_EQ(r.labels, (IntentSet{IntentLabel::kTemporal, IntentLabel::kMultiHop}));
  EXPECT_EQ(r.tier, Tier::kLlm);
  EXPECT_EQ(r.llm_calls, 1);
  EXPECT_FALSE(r.degraded);

  c.reply = R"({"temporal": 0.2, "causal": 0.1, "multi_hop": 0.0, "entity_centric": 0.29})";
  EXPECT_EQ(llm_classify("q", c).labels, IntentSet::general());
  // Some signal but nothing committed still resolves to General.
  c.reply = R"({"temporal": 0.4, "causal": 0.1, "multi_hop": 0.0, "entity_centric": 0.0})";
  EXPECT_EQ(llm_classify("q", c).labels, IntentSet::general());
}

TEST(LlmClassify, FailuresDegradeToGeneral) {
  llm::FailingChatClient failing;
  auto r = llm_classify("q", failing);
  EXPECT_TRUE(r.degraded);
  EXPECT_EQ(r.labels, IntentSet::general());
  EXPECT_EQ(r.llm_calls, 1);
  Counting garbage;
  garbage.reply = "I think it's temporal";
  r = llm_classify("q", garbage);
  EXPECT_TRUE(r.degraded);
  EXPECT_EQ(r.labels, IntentSet::general());
}

TEST(Router, ModesAndCounters) {
  index::HashEmbedder e(64);
  const IntentBank bank = default_bank(e);
  llm::RuleBasedChatClient chat;

  Router off(IntentMode::kOff, nullptr, nullptr, nullptr);
  const auto r0 = off.route("When did it happen?");
  EXPECT_EQ(r0.tier, Tier::kNone);
  EXPECT_EQ(r0.labels, IntentSet::general());

  Router llm_only(IntentMode::kLlm, nullptr, nullptr, &chat);
  const auto r1 = llm_only.route("When did it happen?");
  EXPECT_EQ(r1.tier, Tier::kLlm);
  EXPECT_EQ(llm_only.llm_invocations(), 1u);
  EXPECT_EQ(llm_only.keyword_invocations(), 0u);

  Router hybrid(IntentMode::kHybrid, &bank, &e, &chat);
  const auto r2 = hybrid.route("When did Melanie paint the sunrise?");
  EXPECT_EQ(r2.tier, Tier::kKeywordGated);
  EXPECT_EQ(r2.llm_calls, 0);
  EXPECT_EQ(hybrid.prototype_invocations(), 0u);
  hybrid.route("Tell me about the garden party");
  EXPECT_EQ(hybrid.keyword_invocations(), 2u);
  EXPECT_EQ(hybrid.prototype_invocations(), 1u);
  EXPECT_LE(hybrid.llm_invocations(), 1u);
}

TEST(Router, PrototypeTierSkipsTheClassifier) {
  index::HashEmbedder e(8);
  IntentBank bank;
  bank.prototypes.prototypes = {{IntentLabel::kEntityCentric, "e", axis(8, 3)}, {IntentLabel::kCausal, "c", axis(8, 1)}};
  Counting chat;
  chat.reply = R"({"temporal": 0, "causal": 0, "multi_hop": 0, "entity_centric": 0})";
  Router router(IntentMode::kHybrid, &bank, &e, &chat);
  const auto r = router.route("describe her", axis(8, 3));
  EXPECT_EQ(r.tier, Tier::kPrototype);
  EXPECT_EQ(r.labels, IntentSet{IntentLabel::kEntityCentric});
  EXPECT_EQ(chat.calls(), 0u);
  const auto miss = router.route("describe her", axis(8, 6));
  EXPECT_EQ(miss.tier, Tier::kLlm);
  EXPECT_EQ(chat.calls(), 1u);
}

TEST(Router, ConstructorValidatesDependencies) {
  llm::RuleBasedChatClient chat;
  EXPECT_THROW(Router(IntentMode::kLlm, nullptr, nullptr, nullptr), InputError);
  EXPECT_THROW(Router(IntentMode::kHybrid, nullptr, nullptr, &chat), InputError);
  EXPECT_EQ(parse_intent_mode("llm-only"), IntentMode::kLlm);
  EXPECT_FALSE(parse_intent_mode("maybe"));
}
