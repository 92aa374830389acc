#include "newsxlt/config.hpp"

#include <fstream>
#include <regex>
#include <sstream>

#include <json.hpp>

#include "newsxlt/error.hpp"

namespace newsxlt {

using nlohmann::json;

bool is_valid_language_tag(const std::string& tag) noexcept {
  static const std::regex re("^[a-z]{3}(_[A-Z][a-z]{3})?$");
  return std::regex_match(tag, re);
}

void AppConfig::validate() const {
  pipeline.validate();
  sampler.validate();
  if (eval.max_history < 1) throw Error("eval.max_history must be at least 1");
  if (!is_valid_language_tag(eval.source_language))
    throw Error("malformed source language tag '" + eval.source_language + "'");
  for (const auto& t : eval.target_languages)
    if (!is_valid_language_tag(t)) throw Error("malformed target language tag '" + t + "'");
  for (auto k : eval.k_values)
    if (k != 5 && k != 10) throw Error("eval.k_values supports only 5 and 10");
  for (const auto& [name, path] : io.paths)
    if (path.empty()) throw Error("io path '" + name + "' is empty");
}

namespace {

// Reads known keys of `section` into the callbacks, rejecting unknown ones.
template <typename Handlers>
void read_section(const json& root, const char* name, const Handlers& handlers) {
  if (!root.contains(name)) return;
  const json& section = root.at(name);
  if (!section.is_object()) throw Error(std::string("config section '") + name + "' must be an object");
  for (const auto& [key, value] : section.items()) {
    auto it = handlers.find(key);
    if (it == handlers.end()) throw Error(std::string("unknown config key '") + name + "." + key + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw Error(std::string("config key '") + name + "." + key + "': " + e.what());
    }
  }
}

using Handler = std::function<void(const json&)>;
using HandlerMap = std::map<std::string, Handler>;

}  // namespace

AppConfig parse_config(const std::string& json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("malformed config JSON: ") + e.what());
  }
  if (!root.is_object()) throw Error("config must be a JSON object");
  for (const auto& [key, _] : root.items())
    if (key != "pipeline" && key != "sampler" && key != "eval" && key != "io")
      throw Error("unknown config section '" + key + "'");

  AppConfig cfg;
  auto& p = cfg.pipeline;
  read_section(root, "pipeline",
               HandlerMap{
                   {"k_percent", [&](const json& v) { p.k_percent = v.get<std::map<std::string, double>>(); }},
                   {"default_k_percent", [&](const json& v) { p.default_k_percent = v.get<double>(); }},
                   {"sources", [&](const json& v) { p.sources = v.get<std::set<std::string>>(); }},
                   {"minhash_permutations", [&](const json& v) { p.minhash_permutations = v.get<std::size_t>(); }},
                   {"shingle_n", [&](const json& v) { p.shingle_n = v.get<std::size_t>(); }},
                   {"shingle_unit",
                    [&](const json& v) {
                      const auto s = v.get<std::string>();
                      if (s == "word") p.shingle_unit = ShingleUnit::word;
                      else if (s == "char") p.shingle_unit = ShingleUnit::character;
                      else throw Error("pipeline.shingle_unit must be 'word' or 'char'");
                    }},
                   {"near_dup_threshold", [&](const json& v) { p.near_dup_threshold = v.get<double>(); }},
                   {"lsh_bands", [&](const json& v) { p.lsh_bands = v.get<std::size_t>(); }},
                   {"lsh_rows", [&](const json& v) { p.lsh_rows = v.get<std::size_t>(); }},
                   {"min_letters", [&](const json& v) { p.min_letters = v.get<std::size_t>(); }},
                   {"seed", [&](const json& v) { p.seed = v.get<std::uint64_t>(); }},
               });
  auto& s = cfg.sampler;
  read_section(root, "sampler",
               HandlerMap{
                   {"alpha", [&](const json& v) { s.alpha = v.get<double>(); }},
                   {"min_count", [&](const json& v) { s.min_count = v.get<std::size_t>(); }},
                   {"deletion_ratio", [&](const json& v) { s.deletion_ratio = v.get<double>(); }},
                   {"seed", [&](const json& v) { s.seed = v.get<std::uint64_t>(); }},
                   {"n_examples", [&](const json& v) { s.n_examples = v.get<std::size_t>(); }},
                   {"mode", [&](const json& v) { s.mode = parse_sample_mode(v.get<std::string>()); }},
                   {"phase_split", [&](const json& v) { s.phase_split = v.get<double>(); }},
                   {"batch_size", [&](const json& v) { s.batch_size = v.get<std::size_t>(); }},
               });
  auto& e = cfg.eval;
  read_section(root, "eval",
               HandlerMap{
                   {"source_language", [&](const json& v) { e.source_language = v.get<std::string>(); }},
                   {"target_languages",
                    [&](const json& v) { e.target_languages = v.get<std::vector<std::string>>(); }},
                   {"max_history", [&](const json& v) { e.max_history = v.get<std::size_t>(); }},
                   {"cold_policy", [&](const json& v) { e.cold_policy = parse_cold_policy(v.get<std::string>()); }},
                   {"k_values", [&](const json& v) { e.k_values = v.get<std::vector<std::size_t>>(); }},
               });
  if (root.contains("io")) {
    const json& io = root.at("io");
    if (!io.is_object()) throw Error("config section 'io' must be an object");
    for (const auto& [key, value] : io.items()) {
      if (!value.is_string()) throw Error("io." + key + " must be a string path");
      cfg.io.paths[key] = value.get<std::string>();
    }
  }
  cfg.validate();
  return cfg;
}

AppConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace newsxlt
