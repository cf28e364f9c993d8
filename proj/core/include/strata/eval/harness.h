#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <span>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "strata/eval/config.h"
#include "strata/eval/metrics.h"

namespace strata::eval {

// Conversation id -> its memory. A single entry serves every record.
using MemoryIndex = std::map<std::string, const graph::Memory*>;

struct EvalRun {
  std::vector<nlohmann::json> log;  // one line per question, input order
  RunMetrics metrics;
  nlohmann::json summary;
  std::uint64_t answer_calls = 0;
  std::uint64_t judge_calls = 0;
};

// Runs every record through retrieval, answering and judging. Output is a
// pure function of the inputs, the config and the backends' replies.
EvalRun run_eval(const MemoryIndex& memories, std::span<const QueryRecord> records, const RunConfig& config,
                 index::Embedder& embedder, llm::ChatClient& chat, const routing::IntentBank* bank = nullptr);

// Summary document built from log lines alone.
nlohmann::json summarize(std::span<const nlohmann::json> log, const RunConfig& config);

void write_jsonl(const std::filesystem::path& path, std::span<const nlohmann::json> lines);
std::vector<nlohmann::json> read_jsonl(const std::filesystem::path& path);

// Paired comparison of two runs over the same question ids: McNemar mid-p,
// Wilson intervals and a paired bootstrap of the accuracy difference, overall
// and per category. b counts questions A got right and B got wrong, c the
// reverse. Refuses logs produced with different tokenizers.
nlohmann::json compare_logs(std::span<const nlohmann::json> a, std::span<const nlohmann::json> b,
                            std::size_t resamples = 2000, std::uint64_t seed = 42);

}  // namespace strata::eval
