#include "strata/common/text.h"

#include <unicode/normalizer2.h>
#include <unicode/unistr.h>

#include <cctype>

namespace strata::text {
namespace {

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

bool is_word_byte(unsigned char c) { return c >= 0x80 || std::isalnum(c) != 0; }

bool valid_utf8(const icu::UnicodeString& u, std::string_view original) {
  // fromUTF8 maps malformed sequences to U+FFFD; detect by round trip.
  std::string back;
  u.toUTF8String(back);
  return back == original;
}

}  // namespace

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::string collapse_whitespace(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  bool pending_space = false;
  for (unsigned char c : s) {
    if (is_space(c)) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.push_back(static_cast<char>(c));
  }
  return out;
}

std::string nfc(std::string_view s) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* normalizer = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status)) return std::string(s);
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  if (!valid_utf8(u, s)) return std::string(s);
  icu::UnicodeString normalized = normalizer->normalize(u, status);
  if (U_FAILURE(status)) return std::string(s);
  std::string out;
  normalized.toUTF8String(out);
  return out;
}

std::string normalize_name(std::string_view s) {
  std::string composed = nfc(collapse_whitespace(s));
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(
      icu::StringPiece(composed.data(), static_cast<int32_t>(composed.size())));
  u.foldCase();
  std::string folded;
  u.toUTF8String(folded);
  return nfc(folded);
}

std::size_t code_point_count(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::string truncate_chars(std::string_view s, std::size_t max_chars) {
  std::string composed = nfc(s);
  std::size_t seen = 0;
  for (std::size_t i = 0; i < composed.size(); ++i) {
    if ((static_cast<unsigned char>(composed[i]) & 0xC0) != 0x80) {
      if (seen == max_chars) return composed.substr(0, i);
      ++seen;
    }
  }
  return composed;
}

std::vector<std::string> word_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::string current;
  for (unsigned char c : s) {
    if (is_word_byte(c)) {
      current.push_back(static_cast<char>(c < 0x80 ? std::tolower(c) : c));
    } else if (!current.empty()) {
      out.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) out.push_back(std::move(current));
  return out;
}

std::string to_lower_ascii(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

}  // namespace strata::text
