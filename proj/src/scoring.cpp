#include "newsxlt/scoring.hpp"

namespace newsxlt {

const char* to_string(ColdPolicy p) noexcept { return p == ColdPolicy::error ? "error" : "zero"; }

ColdPolicy parse_cold_policy(const std::string& s) {
  if (s == "error") return ColdPolicy::error;
  if (s == "zero") return ColdPolicy::zero;
  throw Error("unknown cold policy '" + s + "' (expected error or zero)");
}

ScoredImpression score_impression(const Impression& impression, const EmbeddingTablef& table,
                                  std::size_t max_history, ColdPolicy cold_policy) {
  if (max_history == 0) throw Error("max_history must be at least 1");
  ScoredImpression out;
  const std::size_t h = impression.history.size();
  const std::size_t first = h > max_history ? h - max_history : 0;

  std::vector<Eigen::Index> candidate_rows;
  candidate_rows.reserve(impression.candidates.size());
  for (const auto& c : impression.candidates) candidate_rows.push_back(table.row_of(c.news_id));

  std::vector<double> scores(impression.candidates.size(), 0.0);
  if (first == h) {
    if (cold_policy == ColdPolicy::error)
      throw Error("cold user in impression " + impression.impression_id + ": empty click history");
    out.cold = true;
  } else {
    EmbeddingTablef::Matrix history(static_cast<Eigen::Index>(h - first), table.dim());
    for (std::size_t i = first; i < h; ++i)
      history.row(static_cast<Eigen::Index>(i - first)) = table.row(impression.history[i]);
    for (std::size_t c = 0; c < candidate_rows.size(); ++c)
      scores[c] = user_score(table.matrix().row(candidate_rows[c]), history);
  }

  const auto ranks = ranks_by_score(scores);
  out.candidates.reserve(scores.size());
  for (std::size_t c = 0; c < scores.size(); ++c)
    out.candidates.push_back({impression.candidates[c].news_id, scores[c], ranks[c], impression.candidates[c].label});
  return out;
}

}  // namespace newsxlt
