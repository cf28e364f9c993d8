#include "strata/eval/pipeline.h"

#include <algorithm>

#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "strata/eval/tokenizer.h"
#include "strata/llm/chat_client.h"

namespace strata::eval {

using nlohmann::json;

namespace {

std::string episode_block(const graph::Memory& memory, const graph::Node& episode, bool raw_chunk) {
  if (raw_chunk && episode.chunk_hash) {
    auto it = memory.chunks.find(*episode.chunk_hash);
    if (it != memory.chunks.end()) return it->second.text;
  }
  return "[" + episode.timestamp.value_or("") + "]\n" + episode.text;
}

std::string join_blocks(const std::vector<std::string>& blocks) {
  std::string out;
  for (const auto& b : blocks) {
    if (!out.empty()) out += "\n\n";
    out += b;
  }
  return out;
}

}  // namespace

std::vector<std::string> QueryTrace::bundle_episodes() const {
  std::vector<std::string> out;
  for (const auto& e : retrieval.bundle) out.push_back(e.episode.value);
  return out;
}

std::vector<std::string> QueryTrace::ranked_episodes() const {
  std::vector<std::string> out = context_episodes;
  for (const auto& e : retrieval.bundle) {
    if (std::find(out.begin(), out.end(), e.episode.value) == out.end()) out.push_back(e.episode.value);
  }
  return out;
}

json QueryTrace::to_json() const {
  return json{{"question", question},
              {"routing", routing.to_json()},
              {"retrieval", retrieval.trace()},
              {"compression", compression.to_json()},
              {"context_episodes", context_episodes},
              {"context_tokens", context_tokens},
              {"llm_calls", llm_calls},
              {"over_budget", over_budget},
              {"dropped_for_budget", dropped_for_budget}};
}

QueryTrace answer_query(const PipelineContext& ctx, std::string_view question, const RunConfig& config) {
  QueryTrace trace;
  trace.question = std::string(question);

  const index::Embedding q = index::embed_and_normalize(ctx.embedder, question);

  routing::Router router(config.intent_mode, ctx.bank, &ctx.embedder, &ctx.chat);
  trace.routing = router.route(question, q);
  trace.retrieval = retrieval::retrieve(ctx.memory, q, trace.routing.labels, config.retrieval());

  std::vector<compress::Candidate> candidates;
  for (const auto& entry : trace.retrieval.bundle) {
    const graph::Node* node = ctx.memory.graph.find_node(entry.episode);
    candidates.push_back({entry.episode.value, node ? node->text : std::string(), entry.score});
  }
  if (config.enable_n3_rerank) {
    trace.compression = compress::compress(question, candidates, ctx.chat, config.rerank_size);
  } else {
    trace.compression.skipped = true;
    for (std::size_t i = 0; i < candidates.size(); ++i) trace.compression.selected.push_back(i);
  }
  trace.llm_calls = trace.routing.llm_calls + trace.compression.llm_calls;

  std::vector<std::string> blocks;
  for (std::size_t i : trace.compression.selected) {
    const graph::Node* node = ctx.memory.graph.find_node(trace.retrieval.bundle[i].episode);
    if (!node) continue;
    trace.context_episodes.push_back(node->id.value);
    blocks.push_back(episode_block(ctx.memory, *node, config.raw_chunk_context));
  }
  trace.context = join_blocks(blocks);
  trace.context_tokens = count_tokens(config.tokenizer, trace.context);

  if (config.context_budget && trace.context_tokens > *config.context_budget) {
    trace.over_budget = true;
    if (config.truncate_to_budget) {
      while (!blocks.empty() && trace.context_tokens > *config.context_budget) {
        blocks.pop_back();
        trace.context_episodes.pop_back();
        ++trace.dropped_for_budget;
        trace.context = join_blocks(blocks);
        trace.context_tokens = count_tokens(config.tokenizer, trace.context);
      }
    } else {
      spdlog::warn("context of {} tokens exceeds the budget of {}", trace.context_tokens, *config.context_budget);
    }
  }
  return trace;
}

}  // namespace strata::eval
