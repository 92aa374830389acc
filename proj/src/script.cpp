#include <map>
#include <set>

#include <unicode/uchar.h>
#include <unicode/uscript.h>
#include <unicode/utf8.h>

#include "newsxlt/pipeline.hpp"

namespace newsxlt {
namespace {

// ISO 15924 codes that name a union of Unicode Script property values.
const std::map<std::string, std::set<std::string>>& composite_scripts() {
  static const std::map<std::string, std::set<std::string>> table{
      {"Hans", {"Hani"}},
      {"Hant", {"Hani"}},
      {"Jpan", {"Hani", "Hira", "Kana"}},
      {"Kore", {"Hang", "Hani"}},
      {"Hrkt", {"Hira", "Kana"}},
  };
  return table;
}

// Letter count per Unicode script code, Common/Inherited/Unknown excluded.
std::map<std::string, std::size_t> letter_scripts(std::string_view text, std::size_t& letters) {
  std::map<std::string, std::size_t> counts;
  letters = 0;
  const auto* p = reinterpret_cast<const uint8_t*>(text.data());
  const auto len = static_cast<int32_t>(text.size());
  int32_t i = 0;
  while (i < len) {
    UChar32 c;
    U8_NEXT(p, i, len, c);
    if (c < 0 || (U_GET_GC_MASK(c) & U_GC_L_MASK) == 0) continue;
    UErrorCode status = U_ZERO_ERROR;
    const UScriptCode sc = uscript_getScript(c, &status);
    if (U_FAILURE(status) || sc == USCRIPT_COMMON || sc == USCRIPT_INHERITED || sc == USCRIPT_UNKNOWN) continue;
    ++counts[uscript_getShortName(sc)];
    ++letters;
  }
  return counts;
}

}  // namespace

std::string dominant_script(std::string_view text, std::size_t min_letters) {
  std::size_t letters = 0;
  const auto counts = letter_scripts(text, letters);
  if (letters == 0 || letters < min_letters) return {};
  for (const auto& [script, n] : counts)
    if (2 * n > letters) return script;
  return {};
}

bool matches_script(std::string_view text, const std::string& script, std::size_t min_letters) {
  std::size_t letters = 0;
  const auto counts = letter_scripts(text, letters);
  if (letters == 0 || letters < min_letters) return false;
  std::size_t matching = 0;
  auto it = composite_scripts().find(script);
  if (it == composite_scripts().end()) {
    auto c = counts.find(script);
    matching = c == counts.end() ? 0 : c->second;
  } else {
    for (const auto& [sc, n] : counts)
      if (it->second.count(sc)) matching += n;
  }
  return 2 * matching > letters;
}

}  // namespace newsxlt
