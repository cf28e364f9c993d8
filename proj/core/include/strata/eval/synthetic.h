#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "strata/eval/metrics.h"
#include "strata/ingest/conversation.h"
#include "strata/ingest/extraction.h"
#include "strata/ingest/ingestor.h"

namespace strata::eval {

struct SynthOptions {
  std::size_t sessions = 12;
  std::size_t questions = 40;
  std::uint64_t seed = 42;
  std::string conversation_id = "synth-0";
  // Pre-extracted records without entities or timestamps, and an ingest
  // config without chain or causal edges: the graph then has no relation
  // edges that a bridge could cross.
  bool bridge_free = false;
};

struct SyntheticSet {
  ingest::Conversation conversation;
  std::vector<QueryRecord> records;
  // Keyed by chunk hash; filled only for bridge-free sets.
  std::map<std::string, ingest::ExtractionResult> pre_extracted;
  ingest::IngestConfig ingest_config;
};

// LoCoMo-like two-speaker conversation about hobbies, trips and pets, with
// questions whose evidence ids point at the turns that answer them.
SyntheticSet make_synthetic(const SynthOptions& options);

}  // namespace strata::eval
