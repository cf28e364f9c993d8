#include "strata/eval/tokenizer.h"

#include <cctype>
#include <string>

#include "strata/common/error.h"

namespace strata::eval {

std::size_t count_tokens(std::string_view text) {
  std::size_t count = 0;
  bool in_word = false;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    if (c >= 0x80 || std::isalnum(c)) {
      if (!in_word) ++count;
      in_word = true;
      continue;
    }
    in_word = false;
    if (!std::isspace(c)) ++count;
  }
  return count;
}

std::size_t count_tokens(std::string_view tokenizer, std::string_view text) {
  if (tokenizer == kDefaultTokenizer) return count_tokens(text);
  throw InputError("unknown tokenizer '" + std::string(tokenizer) + "'");
}

}  // namespace strata::eval
