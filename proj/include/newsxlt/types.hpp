#pragma once

#include <chrono>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace newsxlt {

/// ISO 639-3 language code plus ISO 15924 script code, e.g. srp/Cyrl.
class LanguageKey {
 public:
  LanguageKey() = default;
  /// Throws Error unless lang is three lowercase ASCII letters and script is
  /// one uppercase followed by three lowercase letters.
  LanguageKey(std::string lang, std::string script);

  /// Parses the "lang_Script" tag form.
  static LanguageKey from_tag(const std::string& tag);

  const std::string& lang() const noexcept { return lang_; }
  const std::string& script() const noexcept { return script_; }
  std::string tag() const { return lang_ + "_" + script_; }

  auto operator<=>(const LanguageKey&) const = default;
  bool operator==(const LanguageKey&) const = default;

 private:
  std::string lang_;
  std::string script_;
};

bool is_valid_lang_code(const std::string& s) noexcept;
bool is_valid_script_code(const std::string& s) noexcept;

using PairKey = std::pair<LanguageKey, LanguageKey>;

std::string pair_tag(const PairKey& key);

struct NewsText {
  std::string id;
  std::string text;
  LanguageKey key;
  std::string source;
  std::size_t char_len = 0;

  /// Builds an item from already-normalized text, computing char_len.
  static NewsText make(std::string id, std::string text, LanguageKey key, std::string source);

  bool operator==(const NewsText&) const = default;
};

struct ParallelPair {
  std::string id;  // empty when the input line carried none
  NewsText src;
  NewsText tgt;
  std::string source;

  PairKey pair_key() const { return {src.key, tgt.key}; }
  bool operator==(const ParallelPair&) const = default;
};

/// Ordered news items with per-language counts kept in sync.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<NewsText> items);

  void push_back(NewsText item);

  const std::vector<NewsText>& items() const noexcept { return items_; }
  const std::map<LanguageKey, std::size_t>& per_key_counts() const noexcept { return counts_; }
  std::size_t size() const noexcept { return items_.size(); }
  bool empty() const noexcept { return items_.empty(); }

  /// Indices of items holding `key`, in input order.
  std::vector<std::size_t> indices_of(const LanguageKey& key) const;

 private:
  std::vector<NewsText> items_;
  std::map<LanguageKey, std::size_t> counts_;
};

struct Candidate {
  std::string news_id;
  int label = 0;
  bool operator==(const Candidate&) const = default;
};

struct Impression {
  std::string impression_id;
  std::string user_id;
  std::string time_text;                  // verbatim column, kept for lossless rewrite
  std::chrono::sys_seconds timestamp{};   // UTC
  std::vector<std::string> history;       // oldest first
  std::vector<Candidate> candidates;

  std::chrono::sys_days day() const { return std::chrono::floor<std::chrono::days>(timestamp); }
  bool operator==(const Impression&) const = default;
};

/// Parses MIND's "M/D/YYYY H:MM:SS AM|PM" timestamps as UTC.
std::chrono::sys_seconds parse_mind_time(const std::string& s);

enum class Objective { dae, mt };

const char* to_string(Objective o) noexcept;

struct Seq2SeqExample {
  std::string input;
  std::string target;
  Objective objective = Objective::dae;
  std::variant<LanguageKey, PairKey> lang;

  bool operator==(const Seq2SeqExample&) const = default;
};

}  // namespace newsxlt
