#include "strata/eval/metrics.h"

#include <algorithm>
#include <fstream>

#include <nlohmann/json.hpp>

#include "strata/common/error.h"
#include "strata/common/text.h"

namespace strata::eval {

using nlohmann::json;

namespace {

std::string as_text(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_null()) return "";
  return v.dump();
}

std::string locomo_category(int c) {
  switch (c) {
    case 1: return "multi_hop";
    case 2: return "temporal";
    case 3: return "open_domain";
    case 4: return "single_hop";
    default: return "";
  }
}

std::vector<std::string> evidence_list(const json& q) {
  std::vector<std::string> out;
  if (!q.contains("evidence")) return out;
  for (const json& e : q["evidence"]) out.push_back(as_text(e));
  return out;
}

std::string numbered(std::string_view prefix, std::size_t i) {
  std::string n = std::to_string(i + 1);
  if (n.size() < 4) n.insert(0, 4 - n.size(), '0');
  return std::string(prefix) + n;
}

struct Acc {
  CategoryMetrics m;
  double tokens = 0.0;
  double calls = 0.0;
  std::map<std::size_t, double> er_sum;
};

void add_line(Acc& a, const json& line, std::span<const std::size_t> er_k) {
  ++a.m.questions;
  a.tokens += line.value("context_tokens", 0.0);
  a.calls += line.value("retrieval_llm_calls", 0.0);
  if (line.value("degraded", false)) ++a.m.degraded;
  const json& label = line.contains("label") ? line["label"] : json(nullptr);
  if (label.is_string()) {
    ++a.m.judged;
    if (label.get<std::string>() == "CORRECT") ++a.m.correct;
  } else {
    ++a.m.unjudged;
  }
  if (line.contains("evidence_recall") && line["evidence_recall"].is_object()) {
    ++a.m.er_questions;
    for (std::size_t k : er_k) a.er_sum[k] += line["evidence_recall"].value(std::to_string(k), 0.0);
  }
}

CategoryMetrics finish(const Acc& a, std::span<const std::size_t> er_k) {
  CategoryMetrics m = a.m;
  if (m.judged) m.judge_score = static_cast<double>(m.correct) / static_cast<double>(m.judged);
  if (m.questions) {
    m.context_tokens_per_query = a.tokens / static_cast<double>(m.questions);
    m.llm_calls_per_query = a.calls / static_cast<double>(m.questions);
  }
  if (m.context_tokens_per_query > 0.0) m.score_per_1k_tokens = m.judge_score / (m.context_tokens_per_query / 1000.0);
  for (std::size_t k : er_k) {
    auto it = a.er_sum.find(k);
    m.evidence_recall[k] =
        m.er_questions && it != a.er_sum.end() ? it->second / static_cast<double>(m.er_questions) : 0.0;
  }
  return m;
}

}  // namespace

json QueryRecord::to_json() const {
  return json{{"id", id},           {"conversation_id", conversation_id}, {"question", question},
              {"gold_answer", gold_answer}, {"category", category},       {"evidence", evidence}};
}

std::vector<QueryRecord> parse_qa(const json& doc) {
  std::vector<QueryRecord> out;
  try {
    const json samples = doc.is_array() ? doc : json::array({doc});
    for (const json& s : samples) {
      if (s.contains("qa")) {
        const std::string conv = as_text(s.value("sample_id", json("")));
        std::size_t i = 0;
        for (const json& q : s.at("qa")) {
          const std::size_t index = i++;
          const json& cat = q.at("category");
          std::string category = cat.is_number_integer() ? locomo_category(cat.get<int>()) : cat.get<std::string>();
          if (category.empty()) continue;
          QueryRecord r;
          r.id = conv + "#" + std::to_string(index);
          r.conversation_id = conv;
          r.question = q.at("question").get<std::string>();
          r.gold_answer = as_text(q.contains("answer") ? q["answer"] : q.value("gold_answer", json("")));
          r.category = std::move(category);
          r.evidence = evidence_list(q);
          out.push_back(std::move(r));
        }
        continue;
      }
      QueryRecord r;
      r.id = s.contains("id") ? as_text(s["id"]) : numbered("q", out.size());
      r.conversation_id = s.value("conversation_id", "");
      r.question = s.at("question").get<std::string>();
      r.gold_answer = as_text(s.at("gold_answer"));
      r.category = s.at("category").get<std::string>();
      r.evidence = evidence_list(s);
      out.push_back(std::move(r));
    }
  } catch (const json::exception& e) {
    throw InputError(std::string("malformed QA file: ") + e.what());
  }
  return out;
}

std::vector<QueryRecord> load_qa(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open " + path.string());
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw InputError(path.string() + " is not valid JSON");
  return parse_qa(doc);
}

std::map<std::string, std::string> evidence_index(const graph::Memory& memory) {
  std::map<std::string, std::string> index;
  for (const graph::Node& n : memory.graph.nodes()) {
    if (n.layer != graph::Layer::kEpisode || !n.chunk_hash) continue;
    auto it = memory.chunks.find(*n.chunk_hash);
    if (it == memory.chunks.end()) continue;
    for (const std::string& d : it->second.dia_ids) index.emplace(d, n.id.value);
  }
  return index;
}

std::vector<std::string> resolve_evidence(const std::map<std::string, std::string>& index,
                                          std::span<const std::string> evidence, std::vector<std::string>* unresolved) {
  std::vector<std::string> gold;
  for (const std::string& entry : evidence) {
    std::size_t start = 0;
    while (start <= entry.size()) {
      std::size_t end = entry.find(';', start);
      if (end == std::string::npos) end = entry.size();
      const std::string part = text::trim(std::string_view(entry).substr(start, end - start));
      start = end + 1;
      if (part.empty()) continue;
      auto it = index.find(part);
      if (it == index.end()) {
        if (unresolved) unresolved->push_back(part);
        continue;
      }
      if (std::find(gold.begin(), gold.end(), it->second) == gold.end()) gold.push_back(it->second);
    }
  }
  return gold;
}

std::optional<double> evidence_recall(std::span<const std::string> ranked, std::span<const std::string> gold,
                                      std::size_t k) {
  if (gold.empty()) return std::nullopt;
  const std::size_t top = std::min(k, ranked.size());
  std::size_t hits = 0;
  for (const std::string& g : gold) {
    if (std::find(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(top), g) !=
        ranked.begin() + static_cast<std::ptrdiff_t>(top)) {
      ++hits;
    }
  }
  return static_cast<double>(hits) / static_cast<double>(gold.size());
}

json CategoryMetrics::to_json() const {
  json er = json::object();
  for (const auto& [k, v] : evidence_recall) er[std::to_string(k)] = v;
  return json{{"questions", questions},
              {"judged", judged},
              {"correct", correct},
              {"unjudged", unjudged},
              {"degraded", degraded},
              {"judge_score", judge_score},
              {"context_tokens_per_query", context_tokens_per_query},
              {"score_per_1k_tokens", score_per_1k_tokens},
              {"llm_calls_per_query", llm_calls_per_query},
              {"er_questions", er_questions},
              {"evidence_recall", er}};
}

json RunMetrics::to_json() const {
  json cats = json::object();
  for (const auto& [name, m] : by_category) cats[name] = m.to_json();
  return json{{"overall", overall.to_json()}, {"by_category", cats}};
}

RunMetrics metrics_from_log(std::span<const json> lines, std::span<const std::size_t> er_k) {
  Acc all;
  std::map<std::string, Acc> cats;
  for (const json& line : lines) {
    add_line(all, line, er_k);
    add_line(cats[line.value("category", "")], line, er_k);
  }
  RunMetrics r;
  r.overall = finish(all, er_k);
  for (const auto& [name, acc] : cats) r.by_category[name] = finish(acc, er_k);
  return r;
}

}  // namespace strata::eval
