#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>
#include <spdlog/spdlog.h>

#include "strata/common/error.h"
#include "strata/eval/config.h"
#include "strata/eval/harness.h"
#include "strata/eval/judge.h"
#include "strata/eval/pipeline.h"
#include "strata/eval/synthetic.h"
#include "strata/graph/checkpoint.h"
#include "strata/ingest/ingestor.h"
#include "strata/llm/chat_client.h"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace strata;

namespace {

struct RunFlags {
  std::string config_path;
  bool no_n1 = false;
  bool no_n2 = false;
  bool no_n3 = false;
  std::string intent_mode;
  std::optional<std::size_t> budget;
  bool truncate = false;
  bool raw_chunks = false;
  std::string record;  // transcript output

  void attach(CLI::App* app) {
    app->add_option("--config", config_path, "JSON run config")->check(CLI::ExistingFile);
    app->add_flag("--no-n1", no_n1, "Backbone templates only");
    app->add_flag("--no-n2", no_n2, "Uniform edge costs (no intent discounts)");
    app->add_flag("--no-n3", no_n3, "Skip reranking; the whole bundle becomes context");
    app->add_option("--intent-mode", intent_mode, "llm | hybrid | off");
    app->add_option("--budget", budget, "Context token budget");
    app->add_flag("--truncate", truncate, "Drop trailing episodes to fit the budget");
    app->add_flag("--raw-chunks", raw_chunks, "Use raw chunk text as context instead of summaries");
    app->add_option("--record", record, "Write every chat reply to this transcript file");
  }

  eval::RunConfig resolve() const {
    eval::RunConfig c = config_path.empty() ? eval::RunConfig{} : eval::RunConfig::load(config_path);
    c.apply_environment();
    if (no_n1) c.enable_n1_bridges = false;
    if (no_n2) c.enable_n2_costs = false;
    if (no_n3) c.enable_n3_rerank = false;
    if (!intent_mode.empty()) {
      auto m = routing::parse_intent_mode(intent_mode);
      if (!m) throw InputError("--intent-mode must be llm, hybrid or off");
      c.intent_mode = *m;
    }
    if (budget) c.context_budget = budget;
    if (truncate) c.truncate_to_budget = true;
    if (raw_chunks) c.raw_chunk_context = true;
    return c;
  }
};

// Wraps the configured chat client so replies can be saved for replay.
struct Session {
  eval::RunConfig config;
  eval::Backends backends;
  std::unique_ptr<llm::RecordingChatClient> recorder;
  std::string record_path;

  explicit Session(const RunFlags& flags) : config(flags.resolve()), backends(eval::make_backends(config)) {
    if (!flags.record.empty()) {
      recorder = std::make_unique<llm::RecordingChatClient>(*backends.chat);
      record_path = flags.record;
    }
  }
  llm::ChatClient& chat() { return recorder ? *recorder : *backends.chat; }
  void save_transcript() const {
    if (recorder) recorder->save(record_path);
  }
};

void write_json(const fs::path& path, const json& doc) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  out << doc.dump(2) << '\n';
}

int cmd_ingest(const RunFlags& flags, const std::string& input, const std::string& out, const std::string& extractions,
               bool resume, bool no_chain, bool no_causal) {
  Session s(flags);
  const std::string identity = s.backends.embedder->identity();
  graph::Memory memory = resume && fs::exists(fs::path(out) / "graph.json") ? graph::load_checkpoint(out, identity)
                                                                             : graph::Memory(s.backends.embedder->dimension());
  memory.embedder_identity = identity;

  std::unique_ptr<ingest::Extractor> extractor;
  if (!extractions.empty()) {
    extractor = std::make_unique<ingest::FileExtractor>(ingest::FileExtractor::load(extractions));
  } else {
    extractor = std::make_unique<ingest::LlmExtractor>(s.chat());
  }
  ingest::IngestConfig ic;
  ic.link_episode_chain = !no_chain;
  ic.causal_consolidation = !no_causal;

  json reports = json::object();
  for (const auto& conv : ingest::load_conversations(input)) {
    const auto chunks = ingest::chunk_conversation(conv);
    ingest::Ingestor ingestor(memory, *s.backends.embedder, *extractor, &s.chat(), ic);
    reports[conv.conversation_id] = ingestor.ingest(chunks).to_json();
  }
  graph::save_checkpoint(memory, out);
  s.save_transcript();
  std::cout << json{{"checkpoint", out},
                    {"nodes", memory.graph.nodes().size()},
                    {"edges", memory.graph.edges().size()},
                    {"conversations", reports}}
                   .dump(2)
            << '\n';
  return 0;
}

int cmd_query(const RunFlags& flags, const std::string& checkpoint, const std::string& question, bool answer,
              const std::string& trace_path) {
  Session s(flags);
  const graph::Memory memory = graph::load_checkpoint(checkpoint, s.backends.embedder->identity());
  const eval::PipelineContext ctx{memory, *s.backends.embedder, s.chat(), s.backends.bank.get()};
  const eval::QueryTrace trace = eval::answer_query(ctx, question, s.config);
  json out = trace.to_json();
  out["context"] = trace.context;
  if (answer) out["answer"] = eval::generate_answer(question, trace.context, s.chat());
  if (!trace_path.empty()) write_json(trace_path, out);
  s.save_transcript();
  std::cout << out.dump(2) << '\n';
  return 0;
}

int cmd_eval(const RunFlags& flags, const std::string& checkpoint, const std::string& qa, const std::string& out_dir,
             bool no_answer) {
  Session s(flags);
  if (no_answer) s.config.answer_and_judge = false;
  const graph::Memory memory = graph::load_checkpoint(checkpoint, s.backends.embedder->identity());
  const auto records = eval::load_qa(qa);

  eval::MemoryIndex memories;
  for (const graph::Node& n : memory.graph.nodes()) memories.emplace(n.conversation_id, &memory);
  if (memories.empty()) memories.emplace("", &memory);

  const eval::EvalRun run =
      eval::run_eval(memories, records, s.config, *s.backends.embedder, s.chat(), s.backends.bank.get());
  // A .jsonl target names the log itself; siblings share its stem.
  const fs::path target(out_dir);
  const bool single = target.extension() == ".jsonl";
  const fs::path dir = single ? (target.has_parent_path() ? target.parent_path() : fs::path(".")) : target;
  const std::string prefix = single ? target.stem().string() + "." : "";
  fs::create_directories(dir);
  eval::write_jsonl(single ? target : dir / "log.jsonl", run.log);
  write_json(dir / (prefix + "summary.json"), run.summary);
  write_json(dir / (prefix + "config.json"), s.config.to_json());
  s.save_transcript();
  std::cout << run.summary["metrics"]["overall"].dump(2) << '\n';
  return 0;
}

int cmd_report(const std::string& log, const std::string& config_path) {
  const eval::RunConfig config = config_path.empty() ? eval::RunConfig{} : eval::RunConfig::load(config_path);
  const auto lines = eval::read_jsonl(log);
  std::cout << eval::summarize(lines, config).dump(2) << '\n';
  return 0;
}

int cmd_stats(const std::string& a, const std::string& b, std::size_t resamples, std::uint64_t seed) {
  const auto la = eval::read_jsonl(a);
  const auto lb = eval::read_jsonl(b);
  std::cout << eval::compare_logs(la, lb, resamples, seed).dump(2) << '\n';
  return 0;
}

int cmd_synth(const eval::SynthOptions& options, const std::string& out_dir) {
  const eval::SyntheticSet set = eval::make_synthetic(options);
  fs::create_directories(out_dir);
  write_json(fs::path(out_dir) / "conversation.json", json::array({ingest::to_json(set.conversation)}));
  json qa = json::array();
  for (const auto& r : set.records) qa.push_back(r.to_json());
  write_json(fs::path(out_dir) / "qa.json", qa);
  if (options.bridge_free) {
    json ex = json::object();
    for (const auto& [hash, r] : set.pre_extracted) ex[hash] = ingest::to_json(r);
    write_json(fs::path(out_dir) / "extractions.json", ex);
  }
  std::cout << "wrote " << set.conversation.sessions.size() << " sessions and " << set.records.size()
            << " questions to " << out_dir << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"strata: retrieval over a layered conversational memory graph"};
  app.require_subcommand(1);
  bool verbose = false;
  app.add_flag("-v,--verbose", verbose, "Debug logging");

  RunFlags ingest_flags, query_flags, eval_flags;

  auto* ingest = app.add_subcommand("ingest", "Build or extend a checkpoint from conversations");
  std::string input, out, extractions;
  bool resume = false, no_chain = false, no_causal = false;
  ingest->add_option("input,--conversation", input, "Conversation JSON")->required()->check(CLI::ExistingFile);
  ingest->add_option("-o,--out", out, "Checkpoint directory")->required();
  ingest->add_option("--extractions,--pre-extracted", extractions, "Pre-extracted records keyed by chunk hash")
      ->check(CLI::ExistingFile);
  ingest->add_flag("--resume", resume, "Extend an existing checkpoint");
  ingest->add_flag("--no-chain", no_chain, "No Temporal edges between consecutive episodes");
  ingest->add_flag("--no-causal", no_causal, "Skip causal consolidation");
  ingest_flags.attach(ingest);

  auto* query = app.add_subcommand("query", "Retrieve context for one question");
  std::string checkpoint, question, trace_path;
  bool answer = false;
  query->add_option("-c,--checkpoint,--ckpt", checkpoint, "Checkpoint directory")->required()->check(CLI::ExistingDirectory);
  query->add_option("question,--question", question, "Question text")->required();
  query->add_option("--trace", trace_path, "Also write the trace JSON to this file");
  query->add_flag("--answer", answer, "Also generate an answer");
  query_flags.attach(query);

  auto* evalc = app.add_subcommand("eval", "Answer and judge a QA set");
  std::string qa, out_dir;
  bool no_answer = false;
  evalc->add_option("-c,--checkpoint,--ckpt-dir", checkpoint, "Checkpoint directory")->required()->check(CLI::ExistingDirectory);
  evalc->add_option("--qa", qa, "QA records")->required()->check(CLI::ExistingFile);
  evalc->add_option("-o,--out", out_dir, "Output directory, or a .jsonl path for the log")->required();
  evalc->add_flag("--retrieval-only", no_answer, "Skip answering and judging");
  eval_flags.attach(evalc);

  auto* report = app.add_subcommand("report", "Recompute a summary from a log");
  std::string log, report_config;
  report->add_option("log", log, "log.jsonl")->required()->check(CLI::ExistingFile);
  report->add_option("--config", report_config, "Config the run used")->check(CLI::ExistingFile);

  auto* stats = app.add_subcommand("stats", "Compare two eval logs");
  std::string log_a, log_b;
  std::size_t resamples = 2000;
  std::uint64_t seed = 42;
  stats->add_option("a,--a", log_a, "Baseline log.jsonl")->required()->check(CLI::ExistingFile);
  stats->add_option("b,--b", log_b, "Treatment log.jsonl")->required()->check(CLI::ExistingFile);
  stats->add_option("--resamples", resamples, "Bootstrap resamples")->capture_default_str();
  stats->add_option("--seed", seed, "Bootstrap seed")->capture_default_str();

  auto* synth = app.add_subcommand("synth", "Generate a synthetic conversation and QA set");
  eval::SynthOptions synth_options;
  std::string synth_out;
  synth->add_option("-o,--out", synth_out, "Output directory")->required();
  synth->add_option("--sessions", synth_options.sessions)->capture_default_str();
  synth->add_option("--questions", synth_options.questions)->capture_default_str();
  synth->add_option("--seed", synth_options.seed)->capture_default_str();
  synth->add_option("--id", synth_options.conversation_id, "Conversation id")->capture_default_str();
  synth->add_flag("--bridge-free", synth_options.bridge_free,
                  "Also write pre-extracted records with no relation structure");

  CLI11_PARSE(app, argc, argv);
  spdlog::set_level(verbose ? spdlog::level::debug : spdlog::level::warn);

  try {
    if (*ingest) return cmd_ingest(ingest_flags, input, out, extractions, resume, no_chain, no_causal);
    if (*query) return cmd_query(query_flags, checkpoint, question, answer, trace_path);
    if (*evalc) return cmd_eval(eval_flags, checkpoint, qa, out_dir, no_answer);
    if (*report) return cmd_report(log, report_config);
    if (*stats) return cmd_stats(log_a, log_b, resamples, seed);
    if (*synth) return cmd_synth(synth_options, synth_out);
  } catch (const InputError& e) {
    spdlog::error("{}", e.what());
    return 2;
  } catch (const CheckpointError& e) {
    spdlog::error("{}", e.what());
    return 3;
  } catch (const Error& e) {
    spdlog::error("{}", e.what());
    return 1;
  }
  return 0;
}
