#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <regex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json_fwd.hpp>

#include "strata/index/embedder.h"

namespace strata::routing {

enum class IntentLabel : std::uint8_t { kTemporal, kCausal, kMultiHop, kEntityCentric, kGeneral };

inline constexpr std::array<IntentLabel, 5> kAllLabels{IntentLabel::kTemporal, IntentLabel::kCausal,
                                                       IntentLabel::kMultiHop, IntentLabel::kEntityCentric,
                                                       IntentLabel::kGeneral};

std::string_view to_string(IntentLabel label);
std::optional<IntentLabel> parse_label(std::string_view s);

// Small bitset over IntentLabel.
class IntentSet {
 public:
  constexpr IntentSet() = default;
  constexpr IntentSet(std::initializer_list<IntentLabel> labels) {
    for (IntentLabel l : labels) add(l);
  }
  static constexpr IntentSet general() { return IntentSet{IntentLabel::kGeneral}; }
  static constexpr IntentSet from_bits(std::uint8_t bits) {
    IntentSet s;
    s.bits_ = bits & 0x1f;
    return s;
  }

  constexpr void add(IntentLabel l) { bits_ |= bit(l); }
  constexpr void remove(IntentLabel l) { bits_ &= static_cast<std::uint8_t>(~bit(l)); }
  constexpr bool contains(IntentLabel l) const { return (bits_ & bit(l)) != 0; }
  constexpr bool empty() const { return bits_ == 0; }
  constexpr std::uint8_t bits() const { return bits_; }

  std::vector<IntentLabel> labels() const;
  // "temporal+causal"; "general" for the General-only set, "" when empty.
  std::string to_string() const;

  friend constexpr bool operator==(IntentSet, IntentSet) = default;

 private:
  static constexpr std::uint8_t bit(IntentLabel l) { return static_cast<std::uint8_t>(1u << static_cast<unsigned>(l)); }
  std::uint8_t bits_ = 0;
};

// MultiHop suppresses EntityCentric; General never coexists with another
// label; an empty set becomes {General}.
IntentSet resolve_labels(IntentSet labels);

struct KeywordRule {
  IntentLabel label;
  std::string pattern;
  std::regex regex;  // \b(?:pattern)\b, case-insensitive
};

struct KeywordBank {
  std::vector<KeywordRule> rules;

  std::size_t count(IntentLabel label) const;
};

struct Prototype {
  IntentLabel label;
  std::string text;
  index::Embedding embedding;
};

struct PrototypeBank {
  std::vector<Prototype> prototypes;
  double threshold = 0.55;
  double margin = 0.10;

  std::size_t count(IntentLabel label) const;
};

struct IntentBank {
  KeywordBank keywords;
  PrototypeBank prototypes;
};

// Parses {"keywords": {label: [pattern,...]}, "prototypes": [{label, text}],
// "manifest": {...}}; prototype texts are embedded with `embedder`. When a
// manifest is present its per-label counts must match. Throws InputError.
IntentBank load_bank(const nlohmann::json& doc, index::Embedder& embedder);
IntentBank load_bank_file(const std::string& path, index::Embedder& embedder);
// The bank compiled into the library.
IntentBank default_bank(index::Embedder& embedder);

}  // namespace strata::routing
