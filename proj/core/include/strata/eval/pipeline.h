#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "strata/compress/compressor.h"
#include "strata/eval/config.h"
#include "strata/graph/checkpoint.h"
#include "strata/retrieval/bundle_search.h"
#include "strata/routing/router.h"

namespace strata::eval {

// Put in front of the answer prompt when retrieval found nothing.
inline constexpr std::string_view kNoEvidenceMarker = "[no relevant memories found]";

// Read-only view shared by all queries of a run.
struct PipelineContext {
  const graph::Memory& memory;
  index::Embedder& embedder;
  llm::ChatClient& chat;  // intent classification and reranking
  const routing::IntentBank* bank = nullptr;
};

struct QueryTrace {
  std::string question;
  routing::RoutingResult routing;
  retrieval::RetrievalResult retrieval;
  compress::CompressionResult compression;
  std::vector<std::string> context_episodes;  // in context order
  std::string context;                         // empty when nothing was retrieved
  std::size_t context_tokens = 0;
  int llm_calls = 0;  // routing + reranking
  bool over_budget = false;
  std::size_t dropped_for_budget = 0;

  std::vector<std::string> bundle_episodes() const;
  // Context episodes first, then the rest of the bundle in bundle order.
  std::vector<std::string> ranked_episodes() const;
  bool degraded() const { return routing.degraded || compression.degraded; }

  nlohmann::json to_json() const;
};

// Routing, retrieval, compression and context assembly for one question.
// Never answers; that is generate_answer's job.
QueryTrace answer_query(const PipelineContext& ctx, std::string_view question, const RunConfig& config);

}  // namespace strata::eval
