#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

namespace strata::llm {
class ChatClient;
}

namespace strata::compress {

inline constexpr std::size_t kSnippetChars = 400;
inline constexpr double kMissingScore = -1.0;

struct Candidate {
  std::string episode;     // node id
  std::string summary;
  double bundle_score = 0.0;
};

struct CompressionResult {
  std::vector<std::size_t> selected;  // bundle indices, in context order
  std::vector<double> scores;         // per candidate; empty when skipped
  bool skipped = false;
  bool degraded = false;
  int llm_calls = 0;
  std::string error;

  nlohmann::json to_json() const;
};

// Snippets are NFC summaries cut to 400 code points, one per line as
// "[i] text" in bundle order. Nothing but the question and the summaries
// goes into the prompt.
std::string render_rerank_prompt(std::string_view question, std::span<const Candidate> candidates);

// Scores from the first top-level JSON array in `reply`: clamped to [0,10],
// out-of-range or repeated indices ignored, missing ones kMissingScore.
// nullopt when no array parses.
std::optional<std::vector<double>> parse_scores(std::string_view reply, std::size_t n_candidates);

// Order of selection: rerank score descending, then bundle score ascending,
// then bundle index.
std::vector<std::size_t> select_top(std::span<const double> scores, std::span<const Candidate> candidates,
                                    std::size_t m);

// Skips (no call) when the bundle already fits in M. On transport or parse
// failure keeps the first M in bundle order and marks the result degraded.
CompressionResult compress(std::string_view question, std::span<const Candidate> candidates, llm::ChatClient& client,
                           std::size_t m = 5);

}  // namespace strata::compress
