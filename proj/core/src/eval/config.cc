#include "strata/eval/config.h"

#include <cstdlib>
#include <fstream>
#include <set>

#include <nlohmann/json.hpp>

#include "strata/common/error.h"

namespace strata::eval {

using nlohmann::json;

namespace {

std::string env_or(const char* name, const std::string& fallback) {
  const char* v = std::getenv(name);
  return v && *v ? std::string(v) : fallback;
}

template <typename T>
void take(const json& doc, const char* key, T& out) {
  if (!doc.contains(key)) return;
  try {
    out = doc.at(key).get<T>();
  } catch (const json::exception& e) {
    throw InputError(std::string("config key '") + key + "': " + e.what());
  }
}

void reject_unknown(const json& doc, const std::set<std::string>& known, const std::string& where) {
  for (const auto& [key, value] : doc.items()) {
    if (!known.contains(key)) throw InputError("unknown config key '" + where + key + "'");
  }
}

}  // namespace

retrieval::RetrievalConfig RunConfig::retrieval() const {
  retrieval::RetrievalConfig r;
  r.k_per_layer = k_per_layer;
  r.bundle_size = bundle_size;
  r.enable_bridges = enable_n1_bridges;
  r.enable_intent_costs = enable_n2_costs;
  r.max_hops = max_hops;
  r.cost = cost;
  return r;
}

json RunConfig::to_json() const {
  json c0;
  for (graph::EdgeKind k : graph::kAllEdgeKinds) c0[std::string(graph::to_string(k))] = cost.fallback(k);
  json j{{"enable_n1_bridges", enable_n1_bridges},
         {"enable_n2_costs", enable_n2_costs},
         {"enable_n3_rerank", enable_n3_rerank},
         {"intent_mode", routing::to_string(intent_mode)},
         {"K", bundle_size},
         {"M", rerank_size},
         {"k_per_layer", k_per_layer},
         {"max_hops", max_hops},
         {"c_hop", cost.c_hop},
         {"c0", c0},
         {"alpha", {{"temporal_temporal", cost.alpha_temporal},
                    {"causal_causal", cost.alpha_causal},
                    {"evolution_temporal", cost.alpha_evolution}}},
         {"theta_proto", theta_proto},
         {"margin", margin},
         {"context_budget", context_budget ? json(*context_budget) : json(nullptr)},
         {"truncate_to_budget", truncate_to_budget},
         {"context_mode", raw_chunk_context ? "raw_chunk" : "summary"},
         {"tokenizer", tokenizer},
         {"er_k", er_k},
         {"answer_and_judge", answer_and_judge},
         {"seed", seed},
         {"bootstrap_resamples", bootstrap_resamples},
         {"intent_bank", intent_bank},
         {"backends",
          {{"embedder", backends.embedder},
           {"dimension", backends.dimension},
           {"embed_url", backends.embed_endpoint.url},
           {"embed_model", backends.embed_endpoint.model},
           {"chat", backends.chat},
           {"chat_url", backends.chat_endpoint.url},
           {"chat_model", backends.chat_endpoint.model},
           {"transcript", backends.transcript}}}};
  return j;
}

RunConfig RunConfig::from_json(const json& doc) {
  if (!doc.is_object()) throw InputError("config must be a JSON object");
  reject_unknown(doc,
                 {"enable_n1_bridges", "enable_n2_costs", "enable_n3_rerank", "intent_mode", "K", "M", "k_per_layer",
                  "max_hops", "c_hop", "c0", "alpha", "theta_proto", "margin", "context_budget", "truncate_to_budget",
                  "context_mode", "tokenizer", "er_k", "answer_and_judge", "seed", "bootstrap_resamples", "intent_bank",
                  "backends"},
                 "");
  RunConfig c;
  take(doc, "enable_n1_bridges", c.enable_n1_bridges);
  take(doc, "enable_n2_costs", c.enable_n2_costs);
  take(doc, "enable_n3_rerank", c.enable_n3_rerank);
  if (doc.contains("intent_mode")) {
    auto mode = routing::parse_intent_mode(doc["intent_mode"].get<std::string>());
    if (!mode) throw InputError("intent_mode must be llm, hybrid or off");
    c.intent_mode = *mode;
  }
  take(doc, "K", c.bundle_size);
  take(doc, "M", c.rerank_size);
  take(doc, "k_per_layer", c.k_per_layer);
  take(doc, "max_hops", c.max_hops);
  take(doc, "c_hop", c.cost.c_hop);
  if (doc.contains("c0")) {
    for (const auto& [name, value] : doc["c0"].items()) {
      auto kind = graph::parse_edge_kind(name);
      if (!kind) throw InputError("unknown edge kind '" + name + "' in c0");
      c.cost.c0[static_cast<std::size_t>(*kind)] = value.get<double>();
    }
  }
  if (doc.contains("alpha")) {
    const json& a = doc["alpha"];
    reject_unknown(a, {"temporal_temporal", "causal_causal", "evolution_temporal"}, "alpha.");
    take(a, "temporal_temporal", c.cost.alpha_temporal);
    take(a, "causal_causal", c.cost.alpha_causal);
    take(a, "evolution_temporal", c.cost.alpha_evolution);
  }
  take(doc, "theta_proto", c.theta_proto);
  take(doc, "margin", c.margin);
  if (doc.contains("context_budget") && !doc["context_budget"].is_null()) {
    c.context_budget = doc["context_budget"].get<std::size_t>();
  }
  take(doc, "truncate_to_budget", c.truncate_to_budget);
  if (doc.contains("context_mode")) {
    const auto mode = doc["context_mode"].get<std::string>();
    if (mode != "summary" && mode != "raw_chunk") throw InputError("context_mode must be summary or raw_chunk");
    c.raw_chunk_context = mode == "raw_chunk";
  }
  take(doc, "tokenizer", c.tokenizer);
  take(doc, "er_k", c.er_k);
  take(doc, "answer_and_judge", c.answer_and_judge);
  take(doc, "seed", c.seed);
  take(doc, "bootstrap_resamples", c.bootstrap_resamples);
  take(doc, "intent_bank", c.intent_bank);
  if (doc.contains("backends")) {
    const json& b = doc["backends"];
    reject_unknown(b, {"embedder", "dimension", "embed_url", "embed_model", "chat", "chat_url", "chat_model", "transcript"},
                   "backends.");
    take(b, "embedder", c.backends.embedder);
    take(b, "dimension", c.backends.dimension);
    take(b, "embed_url", c.backends.embed_endpoint.url);
    take(b, "embed_model", c.backends.embed_endpoint.model);
    take(b, "chat", c.backends.chat);
    take(b, "chat_url", c.backends.chat_endpoint.url);
    take(b, "chat_model", c.backends.chat_endpoint.model);
    take(b, "transcript", c.backends.transcript);
  }
  if (c.bundle_size == 0 || c.rerank_size == 0 || c.k_per_layer == 0) throw InputError("K, M and k_per_layer must be positive");
  return c;
}

RunConfig RunConfig::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open config " + path.string());
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw InputError(path.string() + " is not valid JSON");
  return from_json(doc);
}

void RunConfig::apply_environment() {
  auto& e = backends.embed_endpoint;
  e.url = env_or("STRATA_EMBED_URL", e.url);
  e.api_key = env_or("STRATA_EMBED_KEY", e.api_key);
  e.model = env_or("STRATA_EMBED_MODEL", e.model);
  if (std::getenv("STRATA_EMBED_URL")) backends.embedder = "http";
  auto& c = backends.chat_endpoint;
  c.url = env_or("STRATA_CHAT_URL", c.url);
  c.api_key = env_or("STRATA_CHAT_KEY", c.api_key);
  c.model = env_or("STRATA_CHAT_MODEL", c.model);
  if (std::getenv("STRATA_CHAT_URL")) backends.chat = "http";
}

Backends make_backends(const RunConfig& config) {
  Backends b;
  const auto& bc = config.backends;
  if (bc.embedder == "hash") {
    b.embedder = std::make_unique<index::HashEmbedder>(bc.dimension);
  } else if (bc.embedder == "http") {
    b.embedder = std::make_unique<index::HttpEmbedder>(bc.embed_endpoint, bc.dimension);
  } else {
    throw InputError("unknown embedder backend '" + bc.embedder + "'");
  }
  if (bc.chat == "rule") {
    b.chat = std::make_unique<llm::RuleBasedChatClient>();
  } else if (bc.chat == "http") {
    b.chat = std::make_unique<llm::HttpChatClient>(bc.chat_endpoint);
  } else if (bc.chat == "transcript") {
    if (bc.transcript.empty()) throw InputError("chat = transcript needs backends.transcript");
    b.chat = llm::ScriptedChatClient::from_transcript(bc.transcript);
  } else {
    throw InputError("unknown chat backend '" + bc.chat + "'");
  }
  if (config.intent_mode == routing::IntentMode::kHybrid) {
    b.bank = std::make_unique<routing::IntentBank>(config.intent_bank.empty()
                                                       ? routing::default_bank(*b.embedder)
                                                       : routing::load_bank_file(config.intent_bank, *b.embedder));
    b.bank->prototypes.threshold = config.theta_proto;
    b.bank->prototypes.margin = config.margin;
  }
  return b;
}

}  // namespace strata::eval
