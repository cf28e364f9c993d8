#include "strata/eval/judge.h"

#include <nlohmann/json.hpp>

#include "strata/common/json_extract.h"
#include "strata/common/text.h"
#include "strata/eval/pipeline.h"
#include "strata/llm/chat_client.h"
#include "strata/llm/prompts.h"

namespace strata::eval {

std::string render_answer_prompt(std::string_view question, std::string_view context) {
  return llm::render(llm::prompt_template(llm::kAnswerPrompt),
                     {{"context", context.empty() ? kNoEvidenceMarker : context}, {"question", question}});
}

std::string generate_answer(std::string_view question, std::string_view context, llm::ChatClient& client) {
  return text::trim(client.complete("", render_answer_prompt(question, context)));
}

Judgement parse_judgement(std::string_view reply) {
  Judgement j;
  const auto doc = first_json(reply, '{');
  if (!doc || !doc->contains("label") || !(*doc)["label"].is_string()) {
    j.degraded = true;
    return j;
  }
  const std::string label = text::to_lower_ascii(text::trim((*doc)["label"].get<std::string>()));
  if (doc->contains("reasoning") && (*doc)["reasoning"].is_string()) j.reasoning = (*doc)["reasoning"].get<std::string>();
  if (label == "correct") {
    j.correct = true;
  } else if (label != "wrong") {
    j.degraded = true;
  }
  return j;
}

std::string render_judge_prompt(std::string_view question, std::string_view gold, std::string_view generated) {
  return llm::render(llm::prompt_template(llm::kJudgePrompt),
                     {{"question", question}, {"gold_answer", gold}, {"generated_answer", generated}});
}

Judgement judge_answer(std::string_view question, std::string_view gold, std::string_view generated,
                       llm::ChatClient& client) {
  return parse_judgement(client.complete("", render_judge_prompt(question, gold, generated)));
}

}  // namespace strata::eval
