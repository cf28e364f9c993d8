#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace strata::text {

std::string trim(std::string_view s);
std::string collapse_whitespace(std::string_view s);

// Unicode NFC normalisation (invalid UTF-8 is passed through unchanged).
std::string nfc(std::string_view s);

// NFC, full case folding and whitespace collapse. Used for exact-name matching.
std::string normalize_name(std::string_view s);

std::size_t code_point_count(std::string_view s);

// First `max_chars` code points of the NFC form of `s`.
std::string truncate_chars(std::string_view s, std::size_t max_chars);

// ASCII-lowercased alphanumeric runs; bytes >= 0x80 count as word characters
// so UTF-8 words stay intact.
std::vector<std::string> word_tokens(std::string_view s);

std::string to_lower_ascii(std::string_view s);

}  // namespace strata::text
