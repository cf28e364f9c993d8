#include <gtest/gtest.h>
#include <nlohmann/json.hpp>

#include "strata/compress/compressor.h"
#include "strata/llm/chat_client.h"

using namespace strata;
using namespace strata::compress;

namespace {

std::vector<Candidate> candidates(std::size_t n) {
  std::vector<Candidate> out;
  for (std::size_t i = 0; i < n; ++i) {
    out.push_back({"ep:" + std::to_string(i), "summary number " + std::to_string(i), 0.1 * static_cast<double>(i)});
  }
  return out;
}

class Fixed final : public llm::ChatClient {
 public:
  explicit Fixed(std::string reply) : reply_(std::move(reply)) {}
  std::string identity() const override { return "fixed"; }
  std::string last_user;

 protected:
  std::string do_complete(std::string_view, std::string_view user) override {
    last_user = std::string(user);
    return reply_;
  }

 private:
  std::string reply_;
};

}  // namespace

TEST(ParseScores, ClampsAndIgnoresBadEntries) {
  const auto s = parse_scores(
      R"(Here: [{"index": 0, "score": 7}, {"index": 1, "score": 12}, {"index": 2, "score": -3},
                 {"index": 0, "score": 1}, {"index": 9, "score": 5}, {"index": "3", "score": 5}, {"score": 4}])",
      4);
  ASSERT_TRUE(s);
  EXPECT_EQ(*s, (std::vector<double>{7.0, 10.0, 0.0, kMissingScore}));
}

TEST(ParseScores, NoArrayIsNullopt) {
  EXPECT_FALSE(parse_scores("I cannot rate these.", 3));
  EXPECT_FALSE(parse_scores("[unterminated", 3));
}

TEST(ParseScores, FirstArrayWins) {
  const auto s = parse_scores(R"([{"index": 1, "score": 3}] and later [{"index": 0, "score": 9}])", 2);
  ASSERT_TRUE(s);
  EXPECT_EQ(*s, (std::vector<double>{kMissingScore, 3.0}));
}

TEST(SelectTop, OrdersByScoreThenBundleScoreThenIndex) {
  auto c = candidates(5);
  c[3].bundle_score = 0.0;
  const std::vector<double> scores{5, 8, 5, 5, kMissingScore};
  // 0 and 3 tie on both scores; the lower index goes first.
  EXPECT_EQ(select_top(scores, c, 3), (std::vector<std::size_t>{1, 0, 3}));
  c[2].bundle_score = -1.0;
  EXPECT_EQ(select_top(scores, c, 4), (std::vector<std::size_t>{1, 2, 0, 3}));
  EXPECT_EQ(select_top(scores, c, 10).size(), 5u);
}

TEST(Compress, SkipsWhenBundleFits) {
  Fixed client("[]");
  const auto c = candidates(5);
  const auto r = strata::compress::compress("q", c, client, 5);
  EXPECT_TRUE(r.skipped);
  EXPECT_EQ(r.llm_calls, 0);
  EXPECT_EQ(client.calls(), 0u);
  EXPECT_EQ(r.selected, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  EXPECT_TRUE(strata::compress::compress("q", std::vector<Candidate>{}, client, 5).selected.empty());
}

TEST(Compress, SelectsTopM) {
  Fixed client(R"([{"index": 6, "score": 9}, {"index": 2, "score": 8}, {"index": 0, "score": 1}])");
  const auto c = candidates(8);
  const auto r = strata::compress::compress("What happened?", c, client, 3);
  EXPECT_FALSE(r.skipped);
  EXPECT_FALSE(r.degraded);
  EXPECT_EQ(r.llm_calls, 1);
  EXPECT_EQ(r.selected, (std::vector<std::size_t>{6, 2, 0}));
  ASSERT_EQ(r.scores.size(), 8u);
  EXPECT_EQ(r.scores[1], kMissingScore);
}

TEST(Compress, FailureKeepsBundleOrder) {
  llm::FailingChatClient failing;
  const auto c = candidates(9);
  auto r = strata::compress::compress("q", c, failing, 5);
  EXPECT_TRUE(r.degraded);
  EXPECT_EQ(r.llm_calls, 1);
  EXPECT_EQ(r.selected, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
  Fixed garbage("no scores today");
  r = strata::compress::compress("q", c, garbage, 5);
  EXPECT_TRUE(r.degraded);
  EXPECT_EQ(r.selected, (std::vector<std::size_t>{0, 1, 2, 3, 4}));
}

TEST(RerankPrompt, CarriesOnlyQuestionAndTruncatedSnippets) {
  std::vector<Candidate> c{{"ep:secret-id", std::string(500, 'x'), 0.123456}, {"ep:b", "second\n\nline", 0.5}};
  const std::string prompt = render_rerank_prompt("Where did she go?", c);
  EXPECT_NE(prompt.find("Where did she go?"), std::string::npos);
  EXPECT_NE(prompt.find("[0] " + std::string(400, 'x')), std::string::npos);
  EXPECT_EQ(prompt.find(std::string(401, 'x')), std::string::npos);
  EXPECT_NE(prompt.find("[1] second line"), std::string::npos);
  EXPECT_EQ(prompt.find("ep:secret-id"), std::string::npos);
  EXPECT_EQ(prompt.find("0.123456"), std::string::npos);
}

TEST(RerankPrompt, TruncatesByCodePoint) {
  std::string s;
  for (int i = 0; i < 450; ++i) s += "\xC3\xA9";  // é
  std::vector<Candidate> c{{"ep:a", s, 0.0}};
  const std::string prompt = render_rerank_prompt("q", c);
  std::string expected;
  for (int i = 0; i < 400; ++i) expected += "\xC3\xA9";
  EXPECT_NE(prompt.find("[0] " + expected), std::string::npos);
  EXPECT_EQ(prompt.find(expected + "\xC3\xA9"), std::string::npos);
}

TEST(Compress, RuleBasedClientPrefersOverlap) {
  llm::RuleBasedChatClient rule;
  std::vector<Candidate> c;
  for (const char* s : {"They talked about rain", "Melanie joined a pottery class", "Nothing much",
                        "Groceries and errands", "A long walk", "Pottery wheel practice with Melanie",
                        "Weather again"}) {
    c.push_back({std::string("ep:") + s, s, 0.5});
  }
  const auto r = strata::compress::compress("When did Melanie start pottery?", c, rule, 2);
  ASSERT_EQ(r.selected.size(), 2u);
  EXPECT_FALSE(r.degraded);
  std::vector<std::size_t> sorted = r.selected;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(sorted, (std::vector<std::size_t>{1, 5}));
}

TEST(CompressionResult, JsonShape) {
  CompressionResult r;
  r.selected = {2, 0};
  r.llm_calls = 1;
  const auto j = r.to_json();
  EXPECT_EQ(j["selected"], nlohmann::json({2, 0}));
  EXPECT_FALSE(j.contains("scores"));
}
