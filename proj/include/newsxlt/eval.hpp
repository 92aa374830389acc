#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "newsxlt/embeddings.hpp"
#include "newsxlt/metrics.hpp"
#include "newsxlt/scoring.hpp"
#include "newsxlt/types.hpp"

namespace newsxlt {

enum class Metric { auc, mrr, ndcg5, ndcg10 };
inline constexpr Metric kMetrics[] = {Metric::auc, Metric::mrr, Metric::ndcg5, Metric::ndcg10};
const char* metric_name(Metric m) noexcept;

struct MetricMean {
  double mean = 0.0;
  std::size_t count = 0;
};

struct LanguageResult {
  std::map<Metric, MetricMean> metrics;
  std::size_t impressions = 0;
  std::size_t cold_count = 0;
  std::size_t auc_skipped_count = 0;
  std::size_t no_positive_count = 0;  // excluded from every metric
};

struct EvalReport {
  std::string source_language;
  std::vector<std::string> target_languages;
  std::map<std::string, LanguageResult> per_language;
  std::map<Metric, double> eng;
  std::map<Metric, double> avg;            // over targets only; empty without targets
  std::map<Metric, double> delta_percent;  // empty without targets
  std::size_t cold_count = 0;              // per language; identical across languages
  std::size_t auc_skipped_count = 0;

  std::string to_json() const;
  std::string to_csv() const;
  /// Human-readable table, metrics in percent.
  std::string to_table() const;
};

using TablesByLanguage = std::map<std::string, EmbeddingTablef>;

struct EvalOptions {
  std::size_t max_history = 50;
  ColdPolicy cold_policy = ColdPolicy::zero;
  unsigned threads = 1;
};

/// Missing news ids per language (history and candidates), sorted and unique.
std::map<std::string, std::vector<std::string>> find_missing_ids(const std::vector<Impression>& behaviors,
                                                                 const TablesByLanguage& tables);

/// Scores every impression with each language's table and reduces the
/// per-impression metrics in impression order. Throws CoverageError listing
/// (language, missing ids) before any scoring, and Error for empty behaviors
/// or an unknown source language.
EvalReport run_xlt_eval(const std::vector<Impression>& behaviors, const TablesByLanguage& tables,
                        const std::string& source_language, const EvalOptions& options = {});

struct ImpressionResult {
  std::optional<ImpressionMetrics> metrics;  // nullopt when no candidate is positive
  bool cold = false;
};

/// Per-impression metrics for one table, in impression order.
std::vector<ImpressionResult> evaluate_impressions(const std::vector<Impression>& behaviors,
                                                   const EmbeddingTablef& table, const EvalOptions& options);

/// In-order reduction of per-impression results into per-metric means.
LanguageResult reduce_results(const std::vector<ImpressionResult>& results);

struct Checkpoint {
  std::string id;
  TablesByLanguage tables;
};

struct CheckpointSelection {
  std::string best_id;
  std::size_t best_index = 0;
  /// Per checkpoint, in input order: (id, per-language nDCG@10, mean).
  struct Row {
    std::string id;
    std::map<std::string, double> ndcg10;
    double mean = 0.0;
  };
  std::vector<Row> rows;
};

/// Picks the checkpoint with the highest nDCG@10 averaged over all
/// `languages`; the earliest wins ties. `languages` empty means every
/// language of the first checkpoint.
CheckpointSelection checkpoint_select(const std::vector<Checkpoint>& checkpoints,
                                      const std::vector<Impression>& behaviors,
                                      const std::vector<std::string>& languages, const EvalOptions& options = {});

/// Loads every "<lang>.<ext>" embedding file of a checkpoint directory.
Checkpoint load_checkpoint_dir(const std::filesystem::path& dir);

/// Impressions on the latest calendar day become validation; earlier days
/// become train. Throws Error for single-day (or empty) input.
std::pair<std::vector<Impression>, std::vector<Impression>> split_by_day(const std::vector<Impression>& impressions);

struct TrainingTuple {
  std::string impression_id;
  std::string user_id;
  std::string positive;
  std::vector<std::string> negatives;
};

struct FewShotResult {
  std::vector<Impression> impressions;
  std::vector<TrainingTuple> tuples;  // only when negatives were requested
};

/// Uniform sample of exactly n impressions without replacement, input order
/// kept. With `negatives_per_positive`, also one tuple per positive with up
/// to that many negatives drawn from the same impression.
FewShotResult fewshot_export(const std::vector<Impression>& train, std::size_t n, std::uint64_t seed,
                             std::optional<std::size_t> negatives_per_positive = std::nullopt);

std::size_t write_training_tuples(const std::vector<TrainingTuple>& tuples, std::ostream& out);

}  // namespace newsxlt
