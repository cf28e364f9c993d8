#include "strata/llm/prompts.h"

#include "strata/common/assets.h"
#include "strata/common/error.h"

namespace strata::llm {

std::string_view prompt_template(std::string_view name) {
  auto text = assets::find(name);
  if (!text) throw InputError("unknown prompt template '" + std::string(name) + "'");
  return *text;
}

std::string render(std::string_view tmpl,
                   std::initializer_list<std::pair<std::string_view, std::string_view>> slots) {
  std::string out;
  out.reserve(tmpl.size() + 256);
  std::size_t i = 0;
  while (i < tmpl.size()) {
    if (tmpl[i] == '{') {
      bool replaced = false;
      for (const auto& [name, value] : slots) {
        if (tmpl.compare(i + 1, name.size(), name) == 0 && i + 1 + name.size() < tmpl.size() &&
            tmpl[i + 1 + name.size()] == '}') {
          out.append(value);
          i += name.size() + 2;
          replaced = true;
          break;
        }
      }
      if (replaced) continue;
    }
    out.push_back(tmpl[i++]);
  }
  return out;
}

}  // namespace strata::llm
