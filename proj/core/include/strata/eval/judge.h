#pragma once

#include <string>
#include <string_view>

namespace strata::llm {
class ChatClient;
}

namespace strata::eval {

// Fills the answer prompt; an empty context is replaced by kNoEvidenceMarker.
std::string render_answer_prompt(std::string_view question, std::string_view context);
// Throws BackendError when the call fails.
std::string generate_answer(std::string_view question, std::string_view context, llm::ChatClient& client);

struct Judgement {
  bool correct = false;
  std::string reasoning;
  bool degraded = false;  // reply had no usable label; counted as WRONG
};

// First JSON object with a "label" of CORRECT or WRONG (case-insensitive).
Judgement parse_judgement(std::string_view reply);

std::string render_judge_prompt(std::string_view question, std::string_view gold, std::string_view generated);
// Throws BackendError when the call fails.
Judgement judge_answer(std::string_view question, std::string_view gold, std::string_view generated,
                       llm::ChatClient& client);

}  // namespace strata::eval
