#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "newsxlt/pipeline.hpp"
#include "newsxlt/sampler.hpp"
#include "newsxlt/scoring.hpp"

namespace newsxlt {

struct EvalConfig {
  std::string source_language = "eng";
  std::vector<std::string> target_languages;  // empty: every other loaded language
  std::size_t max_history = 50;
  ColdPolicy cold_policy = ColdPolicy::zero;
  std::vector<std::size_t> k_values{5, 10};
};

struct IoConfig {
  std::map<std::string, std::string> paths;
};

struct AppConfig {
  PipelineConfig pipeline;
  SamplerConfig sampler;
  EvalConfig eval;
  IoConfig io;

  void validate() const;
};

/// Well-formed language tags are "xyz" or "xyz_Abcd".
bool is_valid_language_tag(const std::string& tag) noexcept;

/// Reads a JSON config; absent fields keep their defaults. Unknown keys are
/// rejected so typos do not pass silently.
AppConfig load_config(const std::filesystem::path& path);
AppConfig parse_config(const std::string& json_text);

}  // namespace newsxlt
