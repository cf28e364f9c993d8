#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "strata/index/embedder.h"
#include "strata/llm/chat_client.h"
#include "strata/retrieval/bundle_search.h"
#include "strata/routing/intent.h"
#include "strata/routing/router.h"

namespace strata::eval {

struct BackendConfig {
  std::string embedder = "hash";  // hash | http
  std::size_t dimension = index::kDefaultDimension;
  index::HttpEndpoint embed_endpoint;
  std::string chat = "rule";  // rule | http | transcript
  llm::ChatEndpoint chat_endpoint;
  std::string transcript;  // replay file for chat = transcript
};

struct RunConfig {
  // Ablation switches.
  bool enable_n1_bridges = true;
  bool enable_n2_costs = true;
  bool enable_n3_rerank = true;
  routing::IntentMode intent_mode = routing::IntentMode::kLlm;

  std::size_t bundle_size = 10;  // K
  std::size_t rerank_size = 5;   // M
  std::size_t k_per_layer = 30;
  std::size_t max_hops = 4;
  retrieval::CostParams cost;
  double theta_proto = 0.55;
  double margin = 0.10;

  std::optional<std::size_t> context_budget;
  bool truncate_to_budget = false;
  bool raw_chunk_context = false;
  std::string tokenizer = "ws-punct-v1";
  std::vector<std::size_t> er_k{5, 10};
  bool answer_and_judge = true;

  std::uint64_t seed = 42;
  std::size_t bootstrap_resamples = 2000;
  std::string intent_bank;  // path; empty means the built-in bank

  BackendConfig backends;

  retrieval::RetrievalConfig retrieval() const;

  nlohmann::json to_json() const;
  // Overlays `doc` on the defaults. Unknown keys are an InputError.
  static RunConfig from_json(const nlohmann::json& doc);
  static RunConfig load(const std::filesystem::path& path);

  // STRATA_EMBED_URL / _KEY / _MODEL and STRATA_CHAT_URL / _KEY / _MODEL.
  // A URL switches the matching backend to http.
  void apply_environment();
};

struct Backends {
  std::unique_ptr<index::Embedder> embedder;
  std::unique_ptr<llm::ChatClient> chat;
  std::unique_ptr<routing::IntentBank> bank;
};

// Embedder, chat client and (for hybrid routing) the intent bank.
Backends make_backends(const RunConfig& config);

}  // namespace strata::eval
