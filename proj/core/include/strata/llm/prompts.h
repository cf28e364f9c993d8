#pragma once

#include <initializer_list>
#include <string>
#include <string_view>
#include <utility>

namespace strata::llm {

// Names of the shipped prompt templates.
inline constexpr std::string_view kExtractionPrompt = "prompt_extraction";
inline constexpr std::string_view kCausalPrompt = "prompt_causal";
inline constexpr std::string_view kRerankPrompt = "prompt_rerank";
inline constexpr std::string_view kAnswerPrompt = "prompt_answer";
inline constexpr std::string_view kJudgePrompt = "prompt_judge";
inline constexpr std::string_view kIntentSystemPrompt = "prompt_intent_system";
inline constexpr std::string_view kIntentUserPrompt = "prompt_intent_user";

// Template text of a shipped prompt. Throws InputError for unknown names.
std::string_view prompt_template(std::string_view name);

// Substitutes "{slot}" for each listed slot. Other braces (the JSON examples
// inside the templates) are left alone, as are values that themselves
// contain slot-like text.
std::string render(std::string_view tmpl,
                   std::initializer_list<std::pair<std::string_view, std::string_view>> slots);

}  // namespace strata::llm
