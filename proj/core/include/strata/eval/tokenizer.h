#pragma once

#include <cstddef>
#include <string_view>

namespace strata::eval {

inline constexpr std::string_view kDefaultTokenizer = "ws-punct-v1";

// ws-punct-v1: every maximal alphanumeric run is one token (bytes >= 0x80
// count as alphanumeric) and every other non-space byte is a token of its own.
std::size_t count_tokens(std::string_view text);

// Dispatch by tokenizer identity; throws InputError for unknown names.
std::size_t count_tokens(std::string_view tokenizer, std::string_view text);

}  // namespace strata::eval
