#include "newsxlt/formats.hpp"

#include <istream>
#include <ostream>
#include <unordered_set>

#include <json.hpp>

#include "newsxlt/error.hpp"
#include "newsxlt/text.hpp"

namespace newsxlt {

using nlohmann::json;
using ordered_json = nlohmann::ordered_json;

namespace {

// Yields (line number, content) for every non-blank line, CR stripped.
template <typename Fn>
void for_each_line(std::istream& in, Fn&& fn) {
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    fn(number, line);
  }
  if (in.bad()) throw Error("read failure");
}

json parse_object(const std::string& line, std::size_t number) {
  json obj;
  try {
    obj = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ParseError(std::string("malformed JSON: ") + e.what(), number);
  }
  if (!obj.is_object()) throw ParseError("expected a JSON object", number);
  return obj;
}

std::string string_field(const json& obj, const char* name, std::size_t number) {
  auto it = obj.find(name);
  if (it == obj.end()) throw ParseError(std::string("missing field '") + name + "'", number);
  if (!it->is_string()) throw ParseError(std::string("field '") + name + "' must be a string", number);
  return it->get<std::string>();
}

LanguageKey key_at(const std::string& lang, const std::string& script, std::size_t number) {
  try {
    return LanguageKey(lang, script);
  } catch (const Error& e) {
    throw ParseError(e.what(), number);
  }
}

std::string normalized_field(const json& obj, const char* name, std::size_t number) {
  std::string text;
  try {
    text = normalize_text(string_field(obj, name, number));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(std::string(name) + ": " + e.what(), number);
  }
  if (text.empty()) throw ParseError(std::string("field '") + name + "' is empty after normalization", number);
  return text;
}

void check_source(const std::string& source, const NewsParseOptions& options, std::size_t number) {
  if (source.empty()) throw ParseError("empty source tag", number);
  if (!options.allowed_sources.empty() && !options.allowed_sources.count(source))
    throw ParseError("unknown source '" + source + "'", number);
}

std::size_t put_line(std::ostream& out, const std::string& line) {
  out << line << '\n';
  if (!out) throw Error("write failure");
  return line.size() + 1;
}

LanguageKey tag_field(const json& obj, const char* name, std::size_t number) {
  try {
    return LanguageKey::from_tag(string_field(obj, name, number));
  } catch (const ParseError&) {
    throw;
  } catch (const Error& e) {
    throw ParseError(e.what(), number);
  }
}

}  // namespace

Corpus parse_news_jsonl(std::istream& in, const NewsParseOptions& options) {
  Corpus corpus;
  std::unordered_set<std::string> ids;
  for_each_line(in, [&](std::size_t number, const std::string& line) {
    const json obj = parse_object(line, number);
    std::string id = string_field(obj, "id", number);
    if (id.empty()) throw ParseError("empty id", number);
    if (!ids.insert(id).second) throw ParseError("duplicate id '" + id + "'", number);
    LanguageKey key = key_at(string_field(obj, "lang", number), string_field(obj, "script", number), number);
    std::string source = string_field(obj, "source", number);
    check_source(source, options, number);
    corpus.push_back(NewsText::make(std::move(id), normalized_field(obj, "text", number), std::move(key),
                                    std::move(source)));
  });
  return corpus;
}

std::size_t write_news_jsonl(const std::vector<NewsText>& items, std::ostream& out) {
  std::size_t bytes = 0;
  for (const auto& item : items) {
    ordered_json obj;
    obj["id"] = item.id;
    obj["text"] = item.text;
    obj["lang"] = item.key.lang();
    obj["script"] = item.key.script();
    obj["source"] = item.source;
    bytes += put_line(out, obj.dump());
  }
  return bytes;
}

std::vector<ParallelPair> parse_parallel_jsonl(std::istream& in, const NewsParseOptions& options) {
  std::vector<ParallelPair> pairs;
  std::unordered_set<std::string> ids;
  for_each_line(in, [&](std::size_t number, const std::string& line) {
    const json obj = parse_object(line, number);
    ParallelPair pair;
    if (obj.contains("id")) {
      pair.id = string_field(obj, "id", number);
      if (pair.id.empty()) throw ParseError("empty id", number);
    }
    const std::string base = pair.id.empty() ? "L" + std::to_string(number) : pair.id;
    if (!ids.insert(base).second) throw ParseError("duplicate id '" + base + "'", number);
    pair.source = string_field(obj, "source", number);
    check_source(pair.source, options, number);
    LanguageKey src_key =
        key_at(string_field(obj, "src_lang", number), string_field(obj, "src_script", number), number);
    LanguageKey tgt_key =
        key_at(string_field(obj, "tgt_lang", number), string_field(obj, "tgt_script", number), number);
    if (src_key == tgt_key) throw ParseError("source and target keys are identical", number);
    pair.src = NewsText::make(base + ".src", normalized_field(obj, "src_text", number), std::move(src_key),
                              pair.source);
    pair.tgt = NewsText::make(base + ".tgt", normalized_field(obj, "tgt_text", number), std::move(tgt_key),
                              pair.source);
    pairs.push_back(std::move(pair));
  });
  return pairs;
}

std::size_t write_parallel_jsonl(const std::vector<ParallelPair>& pairs, std::ostream& out) {
  std::size_t bytes = 0;
  for (const auto& pair : pairs) {
    ordered_json obj;
    if (!pair.id.empty()) obj["id"] = pair.id;
    obj["src_lang"] = pair.src.key.lang();
    obj["src_script"] = pair.src.key.script();
    obj["tgt_lang"] = pair.tgt.key.lang();
    obj["tgt_script"] = pair.tgt.key.script();
    obj["src_text"] = pair.src.text;
    obj["tgt_text"] = pair.tgt.text;
    obj["source"] = pair.source;
    bytes += put_line(out, obj.dump());
  }
  return bytes;
}

namespace {

std::vector<std::string> split_on(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::size_t begin = 0;
  while (true) {
    const auto pos = s.find(sep, begin);
    parts.push_back(s.substr(begin, pos == std::string::npos ? std::string::npos : pos - begin));
    if (pos == std::string::npos) break;
    begin = pos + 1;
  }
  return parts;
}

std::vector<std::string> space_tokens(const std::string& s) {
  std::vector<std::string> out;
  for (auto& t : split_on(s, ' '))
    if (!t.empty()) out.push_back(std::move(t));
  return out;
}

}  // namespace

std::vector<Impression> parse_behaviors_tsv(std::istream& in) {
  std::vector<Impression> impressions;
  std::unordered_set<std::string> ids;
  for_each_line(in, [&](std::size_t number, const std::string& line) {
    const auto cols = split_on(line, '\t');
    if (cols.size() < 5) throw ParseError("expected 5 tab-separated columns, got " + std::to_string(cols.size()), number);
    if (cols.size() > 5) throw ParseError("too many columns (" + std::to_string(cols.size()) + ")", number);
    Impression imp;
    imp.impression_id = cols[0];
    imp.user_id = cols[1];
    imp.time_text = cols[2];
    if (imp.impression_id.empty()) throw ParseError("empty impression id", number);
    if (!ids.insert(imp.impression_id).second)
      throw ParseError("duplicate impression id '" + imp.impression_id + "'", number);
    try {
      imp.timestamp = parse_mind_time(imp.time_text);
    } catch (const Error& e) {
      throw ParseError(e.what(), number);
    }
    imp.history = space_tokens(cols[3]);
    for (const auto& token : space_tokens(cols[4])) {
      const auto dash = token.rfind('-');
      if (dash == std::string::npos || dash == 0)
        throw ParseError("candidate '" + token + "' is not of the form id-label", number);
      const std::string label = token.substr(dash + 1);
      if (label != "0" && label != "1") throw ParseError("candidate '" + token + "' has a non-binary label", number);
      imp.candidates.push_back({token.substr(0, dash), label == "1" ? 1 : 0});
    }
    if (imp.candidates.empty()) throw ParseError("impression has no candidates", number);
    impressions.push_back(std::move(imp));
  });
  return impressions;
}

std::size_t write_behaviors_tsv(const std::vector<Impression>& impressions, std::ostream& out) {
  std::size_t bytes = 0;
  for (const auto& imp : impressions) {
    std::string line = imp.impression_id + '\t' + imp.user_id + '\t' + imp.time_text + '\t' + join(imp.history) + '\t';
    for (std::size_t i = 0; i < imp.candidates.size(); ++i) {
      if (i) line += ' ';
      line += imp.candidates[i].news_id + '-' + (imp.candidates[i].label ? '1' : '0');
    }
    bytes += put_line(out, line);
  }
  return bytes;
}

std::size_t write_seq2seq_jsonl(const std::vector<Seq2SeqExample>& examples, std::ostream& out) {
  std::size_t bytes = 0;
  for (const auto& ex : examples) {
    if (ex.input.empty() || ex.target.empty()) throw Error("seq2seq example with empty input or target");
    ordered_json obj;
    obj["input"] = ex.input;
    obj["target"] = ex.target;
    obj["objective"] = to_string(ex.objective);
    if (ex.objective == Objective::mt) {
      const auto* pair = std::get_if<PairKey>(&ex.lang);
      if (!pair) throw Error("mt example requires a language pair");
      obj["src_lang"] = pair->first.tag();
      obj["tgt_lang"] = pair->second.tag();
    } else {
      const auto* key = std::get_if<LanguageKey>(&ex.lang);
      if (!key) throw Error("dae example requires a single language");
      obj["lang"] = key->tag();
    }
    bytes += put_line(out, obj.dump());
  }
  return bytes;
}

std::vector<Seq2SeqExample> parse_seq2seq_jsonl(std::istream& in) {
  std::vector<Seq2SeqExample> examples;
  for_each_line(in, [&](std::size_t number, const std::string& line) {
    const json obj = parse_object(line, number);
    Seq2SeqExample ex;
    ex.input = string_field(obj, "input", number);
    ex.target = string_field(obj, "target", number);
    if (ex.input.empty() || ex.target.empty()) throw ParseError("empty input or target", number);
    const std::string objective = string_field(obj, "objective", number);
    if (objective == "dae") {
      ex.objective = Objective::dae;
      ex.lang = tag_field(obj, "lang", number);
    } else if (objective == "mt") {
      ex.objective = Objective::mt;
      ex.lang = PairKey{tag_field(obj, "src_lang", number), tag_field(obj, "tgt_lang", number)};
    } else {
      throw ParseError("unknown objective '" + objective + "'", number);
    }
    examples.push_back(std::move(ex));
  });
  return examples;
}

std::vector<std::pair<std::string, std::string>> parse_lid_labels(std::istream& in) {
  std::vector<std::pair<std::string, std::string>> labels;
  for_each_line(in, [&](std::size_t number, const std::string& line) {
    const auto cols = split_on(line, '\t');
    if (cols.size() != 2) throw ParseError("expected id<TAB>iso639_3", number);
    if (!is_valid_lang_code(cols[1])) throw ParseError("invalid ISO 639-3 label '" + cols[1] + "'", number);
    labels.emplace_back(cols[0], cols[1]);
  });
  return labels;
}

}  // namespace newsxlt
