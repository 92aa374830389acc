#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "newsxlt/embeddings.hpp"
#include "newsxlt/error.hpp"
#include "newsxlt/types.hpp"

namespace newsxlt {

/// Mean of <candidate, h> over the rows h of `history`, each dot product and
/// the running sum in double, summed in row order.
template <typename DerivedC, typename DerivedH>
double user_score(const Eigen::MatrixBase<DerivedC>& candidate, const Eigen::MatrixBase<DerivedH>& history) {
  if (history.rows() == 0) throw Error("cold user: empty click history");
  const auto c = candidate.reshaped().template cast<double>().eval();
  if (history.cols() != c.size()) throw Error("dimension mismatch between candidate and history");
  double sum = 0.0;
  for (Eigen::Index r = 0; r < history.rows(); ++r)
    sum += history.row(r).transpose().template cast<double>().dot(c);
  return sum / static_cast<double>(history.rows());
}

enum class ColdPolicy { error, zero };

const char* to_string(ColdPolicy p) noexcept;
ColdPolicy parse_cold_policy(const std::string& s);

struct ScoredCandidate {
  std::string news_id;
  double score = 0.0;
  std::size_t rank = 0;  // 1-based
  int label = 0;
};

struct ScoredImpression {
  std::vector<ScoredCandidate> candidates;  // candidate order as in the impression
  bool cold = false;
};

/// 1-based ranks by descending score, ties by position.
template <typename Range>
std::vector<std::size_t> ranks_by_score(const Range& scores) {
  const std::size_t n = std::size(scores);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return scores[a] > scores[b]; });
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[order[i]] = i + 1;
  return rank;
}

/// Late-fusion scores for each candidate against the last `max_history`
/// clicks. Throws CoverageError naming a missing id; under ColdPolicy::error
/// an empty history throws Error.
ScoredImpression score_impression(const Impression& impression, const EmbeddingTablef& table,
                                  std::size_t max_history = 50, ColdPolicy cold_policy = ColdPolicy::error);

}  // namespace newsxlt
