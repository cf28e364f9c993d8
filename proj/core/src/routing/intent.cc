#include "strata/routing/intent.h"

#include <fstream>

#include <nlohmann/json.hpp>

#include "strata/common/assets.h"
#include "strata/common/error.h"

namespace strata::routing {

using nlohmann::json;

std::string_view to_string(IntentLabel label) {
  switch (label) {
    case IntentLabel::kTemporal: return "temporal";
    case IntentLabel::kCausal: return "causal";
    case IntentLabel::kMultiHop: return "multi_hop";
    case IntentLabel::kEntityCentric: return "entity_centric";
    case IntentLabel::kGeneral: return "general";
  }
  return "unknown";
}

std::optional<IntentLabel> parse_label(std::string_view s) {
  for (IntentLabel l : kAllLabels) {
    if (to_string(l) == s) return l;
  }
  return std::nullopt;
}

std::vector<IntentLabel> IntentSet::labels() const {
  std::vector<IntentLabel> out;
  for (IntentLabel l : kAllLabels) {
    if (contains(l)) out.push_back(l);
  }
  return out;
}

std::string IntentSet::to_string() const {
  std::string out;
  for (IntentLabel l : labels()) {
    if (!out.empty()) out += "+";
    out += routing::to_string(l);
  }
  return out;
}

IntentSet resolve_labels(IntentSet labels) {
  if (labels.contains(IntentLabel::kMultiHop)) labels.remove(IntentLabel::kEntityCentric);
  IntentSet specific = labels;
  specific.remove(IntentLabel::kGeneral);
  return specific.empty() ? IntentSet::general() : specific;
}

std::size_t KeywordBank::count(IntentLabel label) const {
  std::size_t n = 0;
  for (const auto& r : rules) n += r.label == label ? 1 : 0;
  return n;
}

std::size_t PrototypeBank::count(IntentLabel label) const {
  std::size_t n = 0;
  for (const auto& p : prototypes) n += p.label == label ? 1 : 0;
  return n;
}

namespace {

IntentLabel require_label(const std::string& s) {
  auto l = parse_label(s);
  if (!l || *l == IntentLabel::kGeneral) throw InputError("unknown intent label '" + s + "' in bank");
  return *l;
}

void check_manifest(const json& expected, const std::map<IntentLabel, std::size_t>& actual, const char* what) {
  for (const auto& [name, count] : expected.items()) {
    const IntentLabel l = require_label(name);
    const auto it = actual.find(l);
    const std::size_t have = it == actual.end() ? 0 : it->second;
    if (!count.is_number_unsigned() || have != count.get<std::size_t>()) {
      throw InputError(std::string("bank ") + what + " for '" + name + "': manifest says " + count.dump() + ", found " +
                       std::to_string(have));
    }
  }
}

}  // namespace

IntentBank load_bank(const json& doc, index::Embedder& embedder) {
  if (!doc.is_object()) throw InputError("intent bank must be a JSON object");
  IntentBank bank;
  std::map<IntentLabel, std::size_t> keyword_counts;
  std::map<IntentLabel, std::size_t> prototype_counts;

  if (doc.contains("keywords")) {
    for (const auto& [name, patterns] : doc.at("keywords").items()) {
      const IntentLabel label = require_label(name);
      for (const auto& p : patterns) {
        if (!p.is_string() || p.get<std::string>().empty()) throw InputError("keyword pattern must be a nonempty string");
        const std::string pattern = p.get<std::string>();
        try {
          bank.keywords.rules.push_back(
              {label, pattern, std::regex("\\b(?:" + pattern + ")\\b", std::regex::ECMAScript | std::regex::icase)});
        } catch (const std::regex_error& e) {
          throw InputError("bad keyword pattern '" + pattern + "': " + e.what());
        }
        ++keyword_counts[label];
      }
    }
  }
  if (doc.contains("prototypes")) {
    for (const auto& p : doc.at("prototypes")) {
      if (!p.contains("label") || !p.contains("text")) throw InputError("prototype needs label and text");
      const IntentLabel label = require_label(p["label"].get<std::string>());
      const std::string text = p["text"].get<std::string>();
      bank.prototypes.prototypes.push_back({label, text, index::embed_and_normalize(embedder, text)});
      ++prototype_counts[label];
    }
  }
  if (doc.contains("threshold")) bank.prototypes.threshold = doc["threshold"].get<double>();
  if (doc.contains("margin")) bank.prototypes.margin = doc["margin"].get<double>();
  if (doc.contains("manifest")) {
    const json& m = doc["manifest"];
    if (m.contains("keywords")) check_manifest(m["keywords"], keyword_counts, "keyword count");
    if (m.contains("prototypes")) check_manifest(m["prototypes"], prototype_counts, "prototype count");
  }
  return bank;
}

IntentBank load_bank_file(const std::string& path, index::Embedder& embedder) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open intent bank " + path);
  const json doc = json::parse(in, nullptr, false);
  if (doc.is_discarded()) throw InputError(path + " is not valid JSON");
  return load_bank(doc, embedder);
}

IntentBank default_bank(index::Embedder& embedder) {
  const auto text = assets::find("bank_default_intent");
  if (!text) throw InputError("default intent bank is missing from the build");
  return load_bank(json::parse(*text), embedder);
}

}  // namespace strata::routing
