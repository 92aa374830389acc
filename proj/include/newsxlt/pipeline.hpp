#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "newsxlt/minhash.hpp"
#include "newsxlt/types.hpp"

namespace newsxlt {

struct PipelineConfig {
  std::map<std::string, double> k_percent{{"wikinews", 15.0}};
  double default_k_percent = 3.0;
  std::set<std::string> sources{"wikinews", "masakhanews", "mafand", "wmt", "globalvoices", "synthetic"};
  std::size_t minhash_permutations = 256;
  std::size_t shingle_n = 5;
  ShingleUnit shingle_unit = ShingleUnit::word;
  double near_dup_threshold = 0.9;
  std::size_t lsh_bands = 16;
  std::size_t lsh_rows = 16;
  std::size_t min_letters = 1;
  std::uint64_t seed = 0;

  double k_for(const std::string& source) const;
  MinHashParams minhash() const { return {minhash_permutations, shingle_n, shingle_unit, seed}; }
  /// Throws Error when an invariant does not hold.
  void validate() const;
};

enum class Stage : std::size_t {
  input,
  exact_dedup,
  script_filter,
  lid_filter,
  length_filter,
  near_dedup,
};
inline constexpr std::size_t kStageCount = 6;
const char* stage_name(Stage s) noexcept;

using StageCounts = std::array<std::size_t, kStageCount>;

struct PipelineStats {
  /// Counts after each stage per (language tag, source).
  std::map<std::pair<std::string, std::string>, StageCounts> cells;
  std::size_t lid_unlabeled = 0;     // items passed through without a label
  std::size_t lid_unknown_ids = 0;   // labels naming ids absent from the input
  bool lid_labels_present = false;

  StageCounts total() const;
  std::map<std::string, StageCounts> per_key() const;
  std::map<std::string, StageCounts> per_source() const;
  std::string to_json() const;
};

using LidLabels = std::unordered_map<std::string, std::string>;

// Single-stage filters. All return a stable subsequence of the input.

std::vector<NewsText> exact_dedup(const std::vector<NewsText>& items);

/// ISO 15924 code of the script held by a strict majority of the letters in
/// `text`, ignoring Common/Inherited letters; empty if there is no majority
/// or fewer than `min_letters` letters.
std::string dominant_script(std::string_view text, std::size_t min_letters = 1);
bool matches_script(std::string_view text, const std::string& script, std::size_t min_letters = 1);

std::vector<NewsText> script_filter(const std::vector<NewsText>& items, const LanguageKey& key,
                                    std::size_t min_letters = 1);

struct LidResult {
  std::vector<NewsText> items;
  std::size_t unlabeled = 0;
};
LidResult lid_filter(const std::vector<NewsText>& items, const LanguageKey& key, const LidLabels* labels);

/// Removes the floor(k/100 * N) items with smallest (char_len, id).
std::vector<NewsText> length_filter(const std::vector<NewsText>& items, double k_percent);

struct NearDedupConfig {
  MinHashParams minhash;
  double threshold = 0.9;
  std::size_t bands = 16;
  std::size_t rows = 16;
};

/// Indices (ascending) of the texts kept by LSH + signature-Jaccard near
/// de-duplication: one survivor, the earliest, per duplicate component.
std::vector<std::size_t> near_dedup_keep(const std::vector<std::string>& texts, const NearDedupConfig& config,
                                         unsigned threads = 1);
std::vector<NewsText> near_dedup(const std::vector<NewsText>& items, const PipelineConfig& config,
                                 unsigned threads = 1);

struct PipelineResult {
  Corpus corpus;
  PipelineStats stats;
};

/// exact_dedup -> script_filter -> lid_filter -> length_filter (per source)
/// -> near_dedup, per language key. Output keeps input order.
PipelineResult run_pipeline(const Corpus& corpus, const PipelineConfig& config, const LidLabels* labels = nullptr,
                            unsigned threads = 1);

struct ParallelPipelineResult {
  std::vector<ParallelPair> pairs;
  PipelineStats stats;
};

/// Same stages for aligned pairs, sharded by (source key, target key).
/// Dedup stages key on the source-side text; script and LID checks apply to
/// both sides; the length filter ranks by source-side length.
ParallelPipelineResult run_parallel_pipeline(const std::vector<ParallelPair>& pairs, const PipelineConfig& config,
                                             const LidLabels* labels = nullptr, unsigned threads = 1);

}  // namespace newsxlt
