#include "strata/eval/harness.h"

#include <fstream>

#include <spdlog/spdlog.h>

#include "strata/common/error.h"
#include "strata/eval/judge.h"
#include "strata/eval/pipeline.h"
#include "strata/eval/statistics.h"
#include "strata/llm/chat_client.h"

namespace strata::eval {

using nlohmann::json;

namespace {

const graph::Memory& memory_for(const MemoryIndex& memories, const QueryRecord& r) {
  auto it = memories.find(r.conversation_id);
  if (it != memories.end()) return *it->second;
  if (memories.size() == 1) return *memories.begin()->second;
  throw InputError("no memory loaded for conversation '" + r.conversation_id + "' (question " + r.id + ")");
}

json bundle_json(const retrieval::Bundle& bundle) {
  json out = json::array();
  for (const auto& e : bundle) {
    out.push_back(json{{"episode", e.episode.value}, {"score", e.score},
                       {"template", std::string(retrieval::to_string(e.path.template_id))}});
  }
  return out;
}

}  // namespace

EvalRun run_eval(const MemoryIndex& memories, std::span<const QueryRecord> records, const RunConfig& config,
                 index::Embedder& embedder, llm::ChatClient& chat, const routing::IntentBank* bank) {
  EvalRun run;
  std::map<const graph::Memory*, std::map<std::string, std::string>> evidence_maps;
  std::size_t unresolved_total = 0;

  for (const QueryRecord& r : records) {
    const graph::Memory& memory = memory_for(memories, r);
    auto [em, fresh] = evidence_maps.try_emplace(&memory);
    if (fresh) em->second = evidence_index(memory);

    const PipelineContext ctx{memory, embedder, chat, bank};
    const QueryTrace trace = answer_query(ctx, r.question, config);

    json line{{"id", r.id},
              {"conversation_id", r.conversation_id},
              {"category", r.category},
              {"question", r.question},
              {"gold_answer", r.gold_answer},
              {"tokenizer", config.tokenizer},
              {"intent", trace.routing.to_json()},
              {"anchors", trace.retrieval.anchors.size()},
              {"recall_size", trace.retrieval.recall_size},
              {"paths", trace.retrieval.paths_enumerated},
              {"bundle", bundle_json(trace.retrieval.bundle)},
              {"rerank", trace.compression.to_json()},
              {"context_episodes", trace.context_episodes},
              {"context_tokens", trace.context_tokens},
              {"over_budget", trace.over_budget},
              {"retrieval_llm_calls", trace.llm_calls},
              {"degraded", trace.degraded()}};

    std::vector<std::string> unresolved;
    const auto gold = resolve_evidence(em->second, r.evidence, &unresolved);
    unresolved_total += unresolved.size();
    line["evidence_episodes"] = gold;
    if (!unresolved.empty()) line["unresolved_evidence"] = unresolved;
    const auto ranked = trace.ranked_episodes();
    if (!gold.empty()) {
      json er = json::object();
      for (std::size_t k : config.er_k) er[std::to_string(k)] = *evidence_recall(ranked, gold, k);
      line["evidence_recall"] = er;
    } else {
      line["evidence_recall"] = nullptr;
    }

    line["answer"] = nullptr;
    line["label"] = nullptr;
    if (config.answer_and_judge) {
      try {
        const std::string answer = generate_answer(r.question, trace.context, chat);
        ++run.answer_calls;
        line["answer"] = answer;
        const Judgement j = judge_answer(r.question, r.gold_answer, answer, chat);
        ++run.judge_calls;
        line["label"] = j.correct ? "CORRECT" : "WRONG";
        line["judge_reasoning"] = j.reasoning;
        line["judge_degraded"] = j.degraded;
      } catch (const BackendError& e) {
        spdlog::warn("question {} left unjudged: {}", r.id, e.what());
        line["unjudged_reason"] = e.what();
      }
    }
    run.log.push_back(std::move(line));
  }

  if (unresolved_total) spdlog::warn("{} evidence ids did not resolve to an episode", unresolved_total);
  run.metrics = metrics_from_log(run.log, config.er_k);
  run.summary = summarize(run.log, config);
  return run;
}

json summarize(std::span<const json> log, const RunConfig& config) {
  std::size_t unresolved = 0;
  for (const json& line : log) {
    if (line.contains("unresolved_evidence")) unresolved += line["unresolved_evidence"].size();
  }
  return json{{"config", config.to_json()},
              {"tokenizer", config.tokenizer},
              {"questions", log.size()},
              {"unresolved_evidence", unresolved},
              {"metrics", metrics_from_log(log, config.er_k).to_json()}};
}

void write_jsonl(const std::filesystem::path& path, std::span<const json> lines) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw InputError("cannot write " + path.string());
  for (const json& l : lines) out << l.dump() << '\n';
}

std::vector<json> read_jsonl(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  std::vector<json> lines;
  std::string s;
  std::size_t n = 0;
  while (std::getline(in, s)) {
    ++n;
    if (s.find_first_not_of(" \t\r") == std::string::npos) continue;
    json j = json::parse(s, nullptr, false);
    if (j.is_discarded()) throw InputError(path.string() + ":" + std::to_string(n) + " is not valid JSON");
    lines.push_back(std::move(j));
  }
  return lines;
}

namespace {

std::string tokenizer_of(std::span<const json> log) {
  std::string tok;
  for (const json& l : log) {
    const std::string t = l.value("tokenizer", "");
    if (tok.empty()) tok = t;
    if (t != tok) throw InputError("a single log mixes tokenizers '" + tok + "' and '" + t + "'");
  }
  return tok;
}

json compare_group(const std::vector<std::pair<bool, bool>>& pairs, std::size_t resamples, std::uint64_t seed) {
  std::vector<std::uint8_t> va, vb;
  std::uint64_t ca = 0, cb = 0, b = 0, c = 0;
  for (const auto& [ra, rb] : pairs) {
    va.push_back(ra);
    vb.push_back(rb);
    ca += ra;
    cb += rb;
    if (ra && !rb) ++b;
    if (!ra && rb) ++c;
  }
  const std::uint64_t n = pairs.size();
  const auto wa = wilson_ci(ca, n);
  const auto wb = wilson_ci(cb, n);
  const auto boot = paired_bootstrap_ci(va, vb, resamples, seed);
  auto acc = [n](std::uint64_t k) { return n ? static_cast<double>(k) / static_cast<double>(n) : 0.0; };
  return json{{"n", n},
              {"accuracy_a", acc(ca)},
              {"accuracy_b", acc(cb)},
              {"wilson_a", {wa.lo, wa.hi}},
              {"wilson_b", {wb.lo, wb.hi}},
              {"b", b},
              {"c", c},
              {"mcnemar_mid_p", mcnemar_mid_p(b, c)},
              {"delta_pp", boot.delta_pp},
              {"bootstrap_ci_pp", {boot.ci_pp.lo, boot.ci_pp.hi}},
              {"resamples", boot.resamples}};
}

}  // namespace

json compare_logs(std::span<const json> a, std::span<const json> b, std::size_t resamples, std::uint64_t seed) {
  const std::string ta = tokenizer_of(a);
  const std::string tb = tokenizer_of(b);
  if (ta != tb) throw InputError("runs used different tokenizers ('" + ta + "' vs '" + tb + "'); refusing to compare");

  std::map<std::string, const json*> by_id;
  for (const json& l : b) by_id[l.at("id").get<std::string>()] = &l;
  if (by_id.size() != b.size() || a.size() != b.size()) throw InputError("runs do not cover the same questions");

  std::vector<std::pair<bool, bool>> all;
  std::map<std::string, std::vector<std::pair<bool, bool>>> cats;
  std::size_t excluded = 0;
  for (const json& la : a) {
    auto it = by_id.find(la.at("id").get<std::string>());
    if (it == by_id.end()) throw InputError("question " + la["id"].get<std::string>() + " is missing from run B");
    const json& lb = *it->second;
    if (!la["label"].is_string() || !lb["label"].is_string()) {
      ++excluded;
      continue;
    }
    const std::pair<bool, bool> p{la["label"] == "CORRECT", lb["label"] == "CORRECT"};
    all.push_back(p);
    cats[la.value("category", "")].push_back(p);
  }

  json out{{"tokenizer", ta}, {"seed", seed}, {"excluded_unjudged", excluded},
           {"overall", compare_group(all, resamples, seed)}};
  json per = json::object();
  for (const auto& [name, pairs] : cats) per[name] = compare_group(pairs, resamples, seed);
  out["by_category"] = per;
  return out;
}

}  // namespace strata::eval
