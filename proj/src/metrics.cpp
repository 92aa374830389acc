#include "newsxlt/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "newsxlt/error.hpp"
#include "newsxlt/scoring.hpp"

namespace newsxlt {
namespace {

std::size_t count_positives(std::span<const int> labels, std::span<const double> scores) {
  if (labels.size() != scores.size()) throw Error("labels and scores differ in length");
  if (labels.empty()) throw Error("empty impression");
  std::size_t pos = 0;
  for (int l : labels) {
    if (l != 0 && l != 1) throw Error("labels must be 0 or 1");
    pos += l == 1;
  }
  return pos;
}

}  // namespace

std::optional<double> auc(std::span<const int> labels, std::span<const double> scores) {
  const std::size_t n = labels.size();
  const std::size_t pos = count_positives(labels, scores);
  const std::size_t neg = n - pos;
  if (pos == 0 || neg == 0) return std::nullopt;

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double rank_sum = 0.0;
  for (std::size_t i = 0; i < n;) {
    std::size_t j = i;
    while (j + 1 < n && scores[order[j + 1]] == scores[order[i]]) ++j;
    const double avg_rank = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t t = i; t <= j; ++t)
      if (labels[order[t]] == 1) rank_sum += avg_rank;
    i = j + 1;
  }
  const double p = static_cast<double>(pos);
  return (rank_sum - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

double mrr(std::span<const int> labels, std::span<const double> scores) {
  const std::size_t pos = count_positives(labels, scores);
  if (pos == 0) throw Error("MRR undefined without a positive candidate");
  const auto ranks = ranks_by_score(scores);
  double sum = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 1) sum += 1.0 / static_cast<double>(ranks[i]);
  return sum / static_cast<double>(pos);
}

double ndcg_at_k(std::span<const int> labels, std::span<const double> scores, std::size_t k) {
  const std::size_t pos = count_positives(labels, scores);
  if (pos == 0) throw Error("nDCG undefined without a positive candidate");
  if (k == 0) throw Error("nDCG cutoff must be at least 1");
  const auto ranks = ranks_by_score(scores);
  double dcg = 0.0;
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 1 && ranks[i] <= k) dcg += 1.0 / std::log2(static_cast<double>(ranks[i]) + 1.0);
  double idcg = 0.0;
  for (std::size_t r = 1; r <= std::min(k, pos); ++r) idcg += 1.0 / std::log2(static_cast<double>(r) + 1.0);
  return dcg / idcg;
}

ImpressionMetrics impression_metrics(std::span<const int> labels, std::span<const double> scores) {
  ImpressionMetrics m;
  m.auc = auc(labels, scores);
  m.mrr = mrr(labels, scores);
  m.ndcg5 = ndcg_at_k(labels, scores, 5);
  m.ndcg10 = ndcg_at_k(labels, scores, 10);
  return m;
}

double round_half_away(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::round(value * scale) / scale;
}

double relative_delta(double eng_value, double avg_value) {
  if (eng_value == 0.0) throw Error("relative delta undefined for a zero reference value");
  const double r = round_half_away(100.0 * (avg_value - eng_value) / eng_value, 2);
  return r == 0.0 ? 0.0 : r;  // no "-0.00"
}

}  // namespace newsxlt
