#pragma once

#include <cstddef>
#include <optional>
#include <span>

namespace newsxlt {

// Ranking metrics over one impression. Labels are 0/1; ranking is by
// descending score with ties resolved by input position (AUC instead
// credits ties with one half).

/// Mann-Whitney AUC with average ranks for ties; nullopt when the labels are
/// single-class. Throws Error on a length mismatch or empty input.
std::optional<double> auc(std::span<const int> labels, std::span<const double> scores);

/// Mean reciprocal rank over all positives. Throws Error if there are none.
double mrr(std::span<const int> labels, std::span<const double> scores);

/// Binary-gain nDCG@k. Throws Error if there are no positives or k == 0.
double ndcg_at_k(std::span<const int> labels, std::span<const double> scores, std::size_t k);

struct ImpressionMetrics {
  std::optional<double> auc;
  double mrr = 0.0;
  double ndcg5 = 0.0;
  double ndcg10 = 0.0;
  bool skipped_auc() const noexcept { return !auc.has_value(); }
};

ImpressionMetrics impression_metrics(std::span<const int> labels, std::span<const double> scores);

/// Rounds half away from zero to `decimals` places.
double round_half_away(double value, int decimals = 2);

/// 100 * (avg - eng) / eng rounded to two decimals. Throws Error if eng == 0.
double relative_delta(double eng_value, double avg_value);

}  // namespace newsxlt
