#include "newsxlt/types.hpp"

#include <cctype>
#include <charconv>

#include "newsxlt/error.hpp"
#include "newsxlt/text.hpp"

namespace newsxlt {

bool is_valid_lang_code(const std::string& s) noexcept {
  if (s.size() != 3) return false;
  for (char c : s)
    if (c < 'a' || c > 'z') return false;
  return true;
}

bool is_valid_script_code(const std::string& s) noexcept {
  if (s.size() != 4 || s[0] < 'A' || s[0] > 'Z') return false;
  for (std::size_t i = 1; i < 4; ++i)
    if (s[i] < 'a' || s[i] > 'z') return false;
  return true;
}

LanguageKey::LanguageKey(std::string lang, std::string script) : lang_(std::move(lang)), script_(std::move(script)) {
  if (!is_valid_lang_code(lang_)) throw Error("invalid ISO 639-3 code '" + lang_ + "' (expected 3 lowercase letters)");
  if (!is_valid_script_code(script_))
    throw Error("invalid ISO 15924 code '" + script_ + "' (expected e.g. Latn)");
}

LanguageKey LanguageKey::from_tag(const std::string& tag) {
  const auto us = tag.find('_');
  if (us == std::string::npos) throw Error("invalid language tag '" + tag + "' (expected lang_Script)");
  return LanguageKey(tag.substr(0, us), tag.substr(us + 1));
}

std::string pair_tag(const PairKey& key) { return key.first.tag() + "-" + key.second.tag(); }

NewsText NewsText::make(std::string id, std::string text, LanguageKey key, std::string source) {
  NewsText t{std::move(id), std::move(text), std::move(key), std::move(source), 0};
  t.char_len = char_length(t.text);
  return t;
}

Corpus::Corpus(std::vector<NewsText> items) {
  items_.reserve(items.size());
  for (auto& item : items) push_back(std::move(item));
}

void Corpus::push_back(NewsText item) {
  ++counts_[item.key];
  items_.push_back(std::move(item));
}

std::vector<std::size_t> Corpus::indices_of(const LanguageKey& key) const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < items_.size(); ++i)
    if (items_[i].key == key) out.push_back(i);
  return out;
}

namespace {

int parse_int(const std::string& s, std::size_t& pos, char stop, const std::string& whole) {
  int value = 0;
  const char* begin = s.data() + pos;
  const char* end = s.data() + s.size();
  auto [ptr, ec] = std::from_chars(begin, end, value);
  if (ec != std::errc() || ptr == begin) throw Error("malformed timestamp '" + whole + "'");
  pos = static_cast<std::size_t>(ptr - s.data());
  if (stop != '\0') {
    if (pos >= s.size() || s[pos] != stop) throw Error("malformed timestamp '" + whole + "'");
    ++pos;
  }
  return value;
}

}  // namespace

std::chrono::sys_seconds parse_mind_time(const std::string& s) {
  using namespace std::chrono;
  std::size_t pos = 0;
  const int month = parse_int(s, pos, '/', s);
  const int day = parse_int(s, pos, '/', s);
  const int year = parse_int(s, pos, ' ', s);
  int hour = parse_int(s, pos, ':', s);
  const int minute = parse_int(s, pos, ':', s);
  const int second = parse_int(s, pos, ' ', s);
  const std::string meridiem = s.substr(pos);
  if (hour < 1 || hour > 12 || minute > 59 || second > 60 || minute < 0 || second < 0)
    throw Error("malformed timestamp '" + s + "'");
  if (meridiem == "AM") {
    if (hour == 12) hour = 0;
  } else if (meridiem == "PM") {
    if (hour != 12) hour += 12;
  } else {
    throw Error("malformed timestamp '" + s + "' (expected AM/PM)");
  }
  const year_month_day ymd{std::chrono::year{year}, std::chrono::month{static_cast<unsigned>(month)},
                           std::chrono::day{static_cast<unsigned>(day)}};
  if (!ymd.ok()) throw Error("invalid date in timestamp '" + s + "'");
  return sys_days{ymd} + hours{hour} + minutes{minute} + seconds{second};
}

const char* to_string(Objective o) noexcept { return o == Objective::dae ? "dae" : "mt"; }

}  // namespace newsxlt
