#include "newsxlt/text.hpp"

#include <unicode/normalizer2.h>
#include <unicode/locid.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>

#include "newsxlt/error.hpp"

namespace newsxlt {
namespace {

const icu::Normalizer2& nfc() {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* n = icu::Normalizer2::getNFCInstance(status);
  if (U_FAILURE(status) || n == nullptr) throw Error("ICU NFC normalizer unavailable");
  return *n;
}

// Code points of a valid UTF-8 string, in order.
template <typename Fn>
void for_each_code_point(std::string_view s, Fn&& fn) {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const auto len = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < len) {
    const int32_t start = i;
    UChar32 c;
    U8_NEXT(p, i, len, c);
    fn(c, start, i);
  }
}

}  // namespace

bool is_valid_utf8(std::string_view s) noexcept {
  const auto* p = reinterpret_cast<const uint8_t*>(s.data());
  const auto len = static_cast<int32_t>(s.size());
  int32_t i = 0;
  while (i < len) {
    UChar32 c;
    U8_NEXT(p, i, len, c);
    if (c < 0) return false;
  }
  return true;
}

std::size_t char_length(std::string_view s) noexcept {
  std::size_t n = 0;
  for_each_code_point(s, [&](UChar32, int32_t, int32_t) { ++n; });
  return n;
}

std::string normalize_text(std::string_view raw) {
  if (!is_valid_utf8(raw)) throw Error("text is not valid UTF-8");
  UErrorCode status = U_ZERO_ERROR;
  const icu::UnicodeString composed =
      nfc().normalize(icu::UnicodeString::fromUTF8(icu::StringPiece(raw.data(), static_cast<int32_t>(raw.size()))),
                      status);
  if (U_FAILURE(status)) throw Error("NFC normalization failed");
  std::string utf8;
  composed.toUTF8String(utf8);

  std::string out;
  out.reserve(utf8.size());
  bool pending_space = false;
  for_each_code_point(utf8, [&](UChar32 c, int32_t begin, int32_t end) {
    if (u_isUWhiteSpace(c)) {
      pending_space = !out.empty();
      return;
    }
    if (pending_space) out.push_back(' ');
    pending_space = false;
    out.append(utf8, static_cast<std::size_t>(begin), static_cast<std::size_t>(end - begin));
  });
  return out;
}

std::string to_lower(std::string_view s) {
  icu::UnicodeString u = icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
  u.toLower(icu::Locale::getRoot());
  std::string out;
  u.toUTF8String(out);
  return out;
}

std::vector<std::string> split_whitespace(std::string_view s) {
  std::vector<std::string> tokens;
  std::size_t token_begin = 0;
  bool in_token = false;
  for_each_code_point(s, [&](UChar32 c, int32_t begin, int32_t) {
    const bool space = c >= 0 && u_isUWhiteSpace(c);
    if (space && in_token) {
      tokens.emplace_back(s.substr(token_begin, static_cast<std::size_t>(begin) - token_begin));
      in_token = false;
    } else if (!space && !in_token) {
      token_begin = static_cast<std::size_t>(begin);
      in_token = true;
    }
  });
  if (in_token) tokens.emplace_back(s.substr(token_begin));
  return tokens;
}

std::string join(const std::vector<std::string>& tokens, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (i) out.append(sep);
    out.append(tokens[i]);
  }
  return out;
}

}  // namespace newsxlt
