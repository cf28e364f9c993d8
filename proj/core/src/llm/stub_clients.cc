#include <algorithm>
#include <cmath>
#include <regex>
#include <set>

#include <nlohmann/json.hpp>

#include "strata/common/error.h"
#include "strata/common/text.h"
#include "strata/common/time.h"
#include "strata/llm/chat_client.h"

namespace strata::llm {
namespace {

using nlohmann::json;

const std::set<std::string>& stopwords() {
  static const std::set<std::string> kWords{
      "a",    "an",   "the",  "and",  "or",   "but",  "of",    "to",    "in",    "on",   "at",    "for",  "with",
      "is",   "are",  "was",  "were", "be",   "been", "do",    "does",  "did",   "i",    "you",   "he",   "she",
      "it",   "we",   "they", "me",   "him",  "her",  "them",  "my",    "your",  "his",  "their", "our",  "its",
      "what", "which", "who", "whom", "this", "that", "these", "those", "as",    "by",   "from",  "about", "so",
      "has",  "have", "had",  "not",  "no",   "yes",  "can",   "could", "would", "will", "just",  "very", "there",
      "how",  "when", "why",  "where", "s",   "t",    "m",     "ve",    "ll",    "d",    "re",    "if",   "then"};
  return kWords;
}

std::vector<std::string> content_tokens(std::string_view s) {
  std::vector<std::string> out;
  for (auto& t : text::word_tokens(s)) {
    if (!stopwords().contains(t)) out.push_back(std::move(t));
  }
  return out;
}

std::set<std::string> content_set(std::string_view s) {
  auto v = content_tokens(s);
  return {v.begin(), v.end()};
}

std::string_view between(std::string_view s, std::string_view open, std::string_view close) {
  auto b = s.find(open);
  if (b == std::string_view::npos) return {};
  b += open.size();
  auto e = close.empty() ? std::string_view::npos : s.find(close, b);
  return s.substr(b, e == std::string_view::npos ? std::string_view::npos : e - b);
}

std::vector<std::string> lines_of(std::string_view s) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (start <= s.size()) {
    auto end = s.find('\n', start);
    if (end == std::string_view::npos) end = s.size();
    out.emplace_back(s.substr(start, end - start));
    start = end + 1;
  }
  return out;
}

std::vector<std::string> sentences_of(std::string_view s) {
  std::vector<std::string> out;
  std::string current;
  for (std::size_t i = 0; i < s.size(); ++i) {
    current.push_back(s[i]);
    const bool boundary = (s[i] == '.' || s[i] == '!' || s[i] == '?') && (i + 1 == s.size() || s[i + 1] == ' ');
    if (boundary) {
      auto t = text::trim(current);
      if (!t.empty()) out.push_back(std::move(t));
      current.clear();
    }
  }
  auto t = text::trim(current);
  if (!t.empty()) out.push_back(std::move(t));
  return out;
}

bool starts_with(std::string_view s, std::string_view prefix) { return s.substr(0, prefix.size()) == prefix; }

// ---- rerank -------------------------------------------------------------

std::string rerank_reply(std::string_view user) {
  const std::string question(text::trim(between(user, "Question: ", "\n")));
  const auto q = content_set(question);
  const std::string_view snippets = between(user, "Snippets:\n", "\n\nReturn a JSON array");
  static const std::regex kLine(R"(^\[(\d+)\]\s?(.*)$)");
  json out = json::array();
  for (const auto& line : lines_of(snippets)) {
    std::smatch m;
    if (!std::regex_match(line, m, kLine)) continue;
    const auto s = content_set(m[2].str());
    std::size_t shared = 0;
    for (const auto& t : q) shared += s.contains(t) ? 1 : 0;
    const double frac = q.empty() ? 0.0 : static_cast<double>(shared) / static_cast<double>(q.size());
    out.push_back({{"index", std::stoi(m[1].str())}, {"score", static_cast<int>(std::lround(10.0 * frac))}});
  }
  return out.dump();
}

// ---- intent -------------------------------------------------------------

std::string intent_reply(std::string_view user) {
  const std::string query = text::to_lower_ascii(text::trim(between(user, "Query: ", "\n")));
  static const std::regex kVague(R"(^\s*(tell me more|continue|go on|and then|ok(ay)?)\W*$)", std::regex::icase);
  static const std::regex kTemporal(
      R"(\b(when|before|after|during|how long|what year|what month|what date|which year|timeline|first time|ago)\b)",
      std::regex::icase);
  static const std::regex kCausal(R"(\b(why|because|what caused|led to|reason|motivat\w*|inspired|prompted)\b)",
                                  std::regex::icase);
  static const std::regex kMultiHop(
      R"(\b(based on|relate|given that|combining|across|in common|pattern|shift\w*|would|likely|might|both|changed)\b)",
      std::regex::icase);
  static const std::regex kEntity(R"(\b(who is|what is|what does|where does|name of|what kind|which|what)\b)",
                                  std::regex::icase);
  json scores{{"temporal", 0.0}, {"causal", 0.0}, {"multi_hop", 0.0}, {"entity_centric", 0.0}};
  if (!std::regex_search(query, kVague)) {
    if (std::regex_search(query, kTemporal)) scores["temporal"] = 0.9;
    if (std::regex_search(query, kCausal)) scores["causal"] = 0.9;
    if (std::regex_search(query, kMultiHop)) scores["multi_hop"] = 0.9;
    if (std::regex_search(query, kEntity)) scores["entity_centric"] = 0.6;
  }
  return scores.dump();
}

// ---- answer -------------------------------------------------------------

std::string answer_reply(std::string_view user) {
  const std::string_view context = between(user, "Context:\n", "\n\nQuestion: ");
  const std::string question(text::trim(between(user, "\n\nQuestion: ", "\n\nInstructions:")));
  const auto q = content_set(question);
  std::string best;
  std::size_t best_overlap = 0;
  for (const auto& line : lines_of(context)) {
    if (line.empty() || line.front() == '[') continue;
    for (const auto& sentence : sentences_of(line)) {
      const auto s = content_set(sentence);
      std::size_t shared = 0;
      for (const auto& t : q) shared += s.contains(t) ? 1 : 0;
      if (shared > best_overlap) {
        best_overlap = shared;
        best = sentence;
      }
    }
  }
  if (best.empty()) return "I cannot answer from the provided context.";
  return best;
}

// ---- judge --------------------------------------------------------------

std::string judge_reply(std::string_view user) {
  const std::string gold(text::trim(between(user, "Gold answer: ", "\nGenerated answer: ")));
  const std::string generated(text::trim(between(user, "Generated answer: ", "\n\nFirst, provide")));
  const auto g = content_set(gold);
  const auto a = content_set(generated);
  bool correct = false;
  std::string reasoning;
  if (g.empty()) {
    correct = text::normalize_name(gold) == text::normalize_name(generated);
    reasoning = "Compared the answers verbatim.";
  } else {
    std::size_t shared = 0;
    for (const auto& t : g) shared += a.contains(t) ? 1 : 0;
    correct = 2 * shared >= g.size();
    reasoning = "The generated answer covers " + std::to_string(shared) + " of " + std::to_string(g.size()) +
                " key terms of the gold answer.";
  }
  return json{{"reasoning", reasoning}, {"label", correct ? "CORRECT" : "WRONG"}}.dump();
}

// ---- causal -------------------------------------------------------------

std::string causal_reply(std::string_view user) {
  const std::string_view events = between(user, "Events:\n", "\n\nReturn a single JSON object");
  static const std::regex kLine(R"(^\[([^\]]+)\]\s*(?:\(([^)]*)\))?\s*(.*)$)");
  static const std::regex kCue(R"(\b(because|decided|inspired|so|led|after|since|motivated|thanks to)\b)",
                               std::regex::icase);
  struct Event {
    std::string id;
    std::set<std::string> tokens;
    bool has_cue;
  };
  std::vector<Event> parsed;
  for (const auto& line : lines_of(events)) {
    std::smatch m;
    if (!std::regex_match(line, m, kLine)) continue;
    std::set<std::string> tokens;
    for (auto& t : content_tokens(m[3].str())) {
      if (t.size() >= 4) tokens.insert(std::move(t));
    }
    parsed.push_back({m[1].str(), std::move(tokens), std::regex_search(m[3].str(), kCue)});
  }
  json pairs = json::array();
  for (std::size_t j = 1; j < parsed.size(); ++j) {
    if (!parsed[j].has_cue) continue;
    std::size_t best = 0;
    std::size_t best_shared = 0;
    for (std::size_t i = 0; i < j; ++i) {
      std::size_t shared = 0;
      for (const auto& t : parsed[i].tokens) shared += parsed[j].tokens.contains(t) ? 1 : 0;
      if (shared >= best_shared && shared > 0) {
        best_shared = shared;
        best = i;
      }
    }
    if (best_shared == 0) continue;
    const double confidence = std::min(0.9, 0.5 + 0.1 * static_cast<double>(best_shared));
    pairs.push_back({{"cause_id", parsed[best].id},
                     {"effect_id", parsed[j].id},
                     {"description", "earlier event motivates the later one"},
                     {"confidence", confidence}});
  }
  return json{{"causal_pairs", pairs}}.dump();
}

// ---- extraction ---------------------------------------------------------

struct Resolved {
  std::string expression;
  std::optional<std::string> normalized;
};

std::optional<Resolved> find_time_expression(const std::string& sentence, std::optional<std::int64_t> day) {
  static const std::regex kExpr(
      R"(\b(yesterday|today|this morning|last week|last weekend|last month|last year|next month|(\d+|a|one|two|three|four|five) (day|week|month|year)s? ago|in ((?:19|20)\d\d)))",
      std::regex::icase);
  std::smatch m;
  if (!std::regex_search(sentence, m, kExpr)) return std::nullopt;
  Resolved r{m[1].str(), std::nullopt};
  if (!day) return r;
  const std::string e = text::to_lower_ascii(r.expression);
  const CivilDate c = civil_from_days(*day);
  auto month_string = [](std::int64_t y, int mo) {
    while (mo < 1) { mo += 12; --y; }
    while (mo > 12) { mo -= 12; ++y; }
    char buf[16];
    std::snprintf(buf, sizeof(buf), "%04lld-%02d", static_cast<long long>(y), mo);
    return std::string(buf);
  };
  if (e == "yesterday") {
    r.normalized = format_date(*day - 1);
  } else if (e == "today" || e == "this morning") {
    r.normalized = format_date(*day);
  } else if (e == "last week" || e == "last weekend") {
    r.normalized = format_date(*day - 7);
  } else if (e == "last month") {
    r.normalized = month_string(c.year, static_cast<int>(c.month) - 1);
  } else if (e == "next month") {
    r.normalized = month_string(c.year, static_cast<int>(c.month) + 1);
  } else if (e == "last year") {
    r.normalized = std::to_string(c.year - 1);
  } else if (m[4].matched) {
    r.normalized = m[4].str();
  } else if (m[2].matched) {
    const std::string n = text::to_lower_ascii(m[2].str());
    static const std::map<std::string, int> kWords{{"a", 1}, {"one", 1}, {"two", 2}, {"three", 3}, {"four", 4}, {"five", 5}};
    const int count = kWords.contains(n) ? kWords.at(n) : std::stoi(n);
    const std::string unit = text::to_lower_ascii(m[3].str());
    if (unit == "day") r.normalized = format_date(*day - count);
    if (unit == "week") r.normalized = format_date(*day - 7 * count);
    if (unit == "month") r.normalized = month_string(c.year, static_cast<int>(c.month) - count);
    if (unit == "year") r.normalized = std::to_string(c.year - count);
  }
  return r;
}

// Runs of capitalised words that do not open the sentence.
std::vector<std::string> proper_names(const std::string& sentence) {
  static const std::set<std::string> kSkip{"I", "I'm", "I've", "I'll", "I'd"};
  std::vector<std::string> words;
  std::string current;
  for (char c : sentence) {
    if (std::isalnum(static_cast<unsigned char>(c)) || c == '\'' || c == '-') {
      current.push_back(c);
    } else {
      if (!current.empty()) words.push_back(current);
      current.clear();
      if (c == ',' || c == ';' || c == ':') words.emplace_back(",");
    }
  }
  if (!current.empty()) words.push_back(current);

  std::vector<std::string> names;
  std::string run;
  for (std::size_t i = 0; i < words.size(); ++i) {
    const std::string& w = words[i];
    const bool cap = i > 0 && w != "," && std::isupper(static_cast<unsigned char>(w[0])) && !kSkip.contains(w);
    if (cap) {
      run += run.empty() ? w : " " + w;
    } else if (!run.empty()) {
      names.push_back(run);
      run.clear();
    }
  }
  if (!run.empty()) names.push_back(run);
  return names;
}

std::string extraction_reply(std::string_view user) {
  const std::string_view chunk = between(user, "Text chunk:\n", "\n\nReturn a single JSON object");
  const auto lines = lines_of(chunk);
  std::optional<std::int64_t> day;
  std::size_t first = 0;
  if (!lines.empty() && lines[0].size() > 2 && lines[0].front() == '[' && lines[0].back() == ']') {
    if (auto iso = normalize_header_timestamp(lines[0].substr(1, lines[0].size() - 2))) {
      if (auto span = parse_iso8601(*iso)) day = span->begin / 86400;
    }
    first = 1;
  }

  json entities = json::array();
  json facet_points = json::array();
  json temporal = json::array();
  std::set<std::string> seen_entities;
  std::vector<std::string> speakers;
  std::map<std::string, std::vector<std::size_t>> by_speaker;
  std::map<std::string, std::string> first_sentence;
  std::string summary;

  auto add_entity = [&](const std::string& name, const char* type) {
    if (seen_entities.insert(text::normalize_name(name)).second) entities.push_back({{"name", name}, {"entity_type", type}});
  };

  for (std::size_t i = first; i < lines.size(); ++i) {
    const std::string line = text::trim(lines[i]);
    const auto colon = line.find(": ");
    if (line.empty() || colon == std::string::npos) continue;
    const std::string speaker = line.substr(0, colon);
    const std::string said = text::trim(line.substr(colon + 2));
    if (said.empty()) continue;
    if (std::find(speakers.begin(), speakers.end(), speaker) == speakers.end()) speakers.push_back(speaker);
    add_entity(speaker, "person");
    summary += (summary.empty() ? "" : " ") + speaker + " said: " + said;

    for (const auto& sentence : sentences_of(said)) {
      const auto names = proper_names(sentence);
      for (const auto& n : names) {
        if (n != speaker) add_entity(n, "other");
      }
      std::string related = speaker;
      for (const auto& n : names) {
        if (n != speaker) {
          related = n;
          break;
        }
      }
      json fp{{"content", speaker + ": " + sentence}, {"related_entity_name", related}, {"timestamp_text", nullptr}};
      if (auto t = find_time_expression(sentence, day)) {
        fp["timestamp_text"] = t->expression;
        temporal.push_back({{"subject", speaker + ": " + sentence},
                            {"time_expression", t->expression},
                            {"normalized_time", t->normalized ? json(*t->normalized) : json(nullptr)},
                            {"relation", "at"}});
      }
      by_speaker[speaker].push_back(facet_points.size());
      if (!first_sentence.contains(speaker)) first_sentence[speaker] = sentence;
      facet_points.push_back(std::move(fp));
    }
  }

  json facets = json::array();
  for (const auto& speaker : speakers) {
    auto words = text::word_tokens(first_sentence[speaker]);
    if (words.size() > 6) words.resize(6);
    std::string theme = speaker + " on";
    for (const auto& w : words) theme += " " + w;
    facets.push_back({{"theme", theme}, {"facet_point_indices", by_speaker[speaker]}});
  }
  if (summary.empty()) summary = text::collapse_whitespace(chunk);
  return json{{"episode_summary", summary},
              {"entities", entities},
              {"facet_points", facet_points},
              {"facets", facets},
              {"temporal_info", temporal}}
      .dump();
}

}  // namespace

std::string RuleBasedChatClient::do_complete(std::string_view system, std::string_view user) {
  if (starts_with(system, "You are an intent classifier")) return intent_reply(user);
  if (starts_with(user, "Rate the relevance of each memory snippet")) return rerank_reply(user);
  if (starts_with(user, "You are a helpful assistant answering questions")) return answer_reply(user);
  if (starts_with(user, "You are an evaluation judge")) return judge_reply(user);
  if (starts_with(user, "You are a causal reasoning engine")) return causal_reply(user);
  if (starts_with(user, "You are an information extraction engine")) return extraction_reply(user);
  throw BackendError("rule-based client does not recognise this prompt");
}

}  // namespace strata::llm
