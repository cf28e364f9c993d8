#include "strata/compress/compressor.h"

#include <algorithm>
#include <numeric>

#include <nlohmann/json.hpp>

#include "strata/common/error.h"
#include "strata/common/json_extract.h"
#include "strata/common/text.h"
#include "strata/llm/chat_client.h"
#include "strata/llm/prompts.h"

namespace strata::compress {

using nlohmann::json;

json CompressionResult::to_json() const {
  json j{{"selected", selected}, {"skipped", skipped}, {"degraded", degraded}, {"llm_calls", llm_calls}};
  if (!scores.empty()) j["scores"] = scores;
  if (!error.empty()) j["error"] = error;
  return j;
}

std::string render_rerank_prompt(std::string_view question, std::span<const Candidate> candidates) {
  std::string snippets;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (i) snippets += "\n";
    snippets += "[" + std::to_string(i) + "] " +
                text::collapse_whitespace(text::truncate_chars(candidates[i].summary, kSnippetChars));
  }
  return llm::render(llm::prompt_template(llm::kRerankPrompt), {{"question", question}, {"snippets", snippets}});
}

std::optional<std::vector<double>> parse_scores(std::string_view reply, std::size_t n_candidates) {
  const auto doc = first_json(reply, '[');
  if (!doc) return std::nullopt;
  std::vector<double> scores(n_candidates, kMissingScore);
  std::vector<bool> seen(n_candidates, false);
  for (const json& item : *doc) {
    if (!item.is_object() || !item.contains("index") || !item.contains("score")) continue;
    const json& idx = item["index"];
    const json& score = item["score"];
    if (!idx.is_number_integer() || !score.is_number()) continue;
    const auto i = idx.get<long long>();
    if (i < 0 || static_cast<std::size_t>(i) >= n_candidates || seen[static_cast<std::size_t>(i)]) continue;
    seen[static_cast<std::size_t>(i)] = true;
    scores[static_cast<std::size_t>(i)] = std::clamp(score.get<double>(), 0.0, 10.0);
  }
  return scores;
}

std::vector<std::size_t> select_top(std::span<const double> scores, std::span<const Candidate> candidates,
                                    std::size_t m) {
  std::vector<std::size_t> order(candidates.size());
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (scores[a] != scores[b]) return scores[a] > scores[b];
    if (candidates[a].bundle_score != candidates[b].bundle_score) {
      return candidates[a].bundle_score < candidates[b].bundle_score;
    }
    return a < b;
  });
  order.resize(std::min(m, order.size()));
  return order;
}

CompressionResult compress(std::string_view question, std::span<const Candidate> candidates, llm::ChatClient& client,
                           std::size_t m) {
  CompressionResult r;
  auto first_m = [&] {
    r.selected.resize(std::min(m, candidates.size()));
    std::iota(r.selected.begin(), r.selected.end(), 0);
  };
  if (candidates.size() <= m) {
    r.skipped = true;
    first_m();
    return r;
  }
  r.llm_calls = 1;
  std::string reply;
  try {
    reply = client.complete({}, render_rerank_prompt(question, candidates));
  } catch (const BackendError& e) {
    r.degraded = true;
    r.error = e.what();
    first_m();
    return r;
  }
  auto scores = parse_scores(reply, candidates.size());
  if (!scores) {
    r.degraded = true;
    r.error = "no score array in rerank reply";
    first_m();
    return r;
  }
  r.scores = std::move(*scores);
  r.selected = select_top(r.scores, candidates, m);
  return r;
}

}  // namespace strata::compress
