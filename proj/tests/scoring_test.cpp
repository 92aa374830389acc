#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "newsxlt/scoring.hpp"
#include "oracles.hpp"

using namespace newsxlt;
using Matrix = EmbeddingTablef::Matrix;

namespace {

std::vector<double> to_std(const Eigen::RowVectorXf& v) { return {v.data(), v.data() + v.size()}; }

EmbeddingTablef random_table(std::size_t n, Eigen::Index dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<float> g;
  Matrix m(static_cast<Eigen::Index>(n), dim);
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < dim; ++c) m(r, c) = g(rng);
  std::vector<std::string> ids;
  for (std::size_t i = 0; i < n; ++i) ids.push_back("N" + std::to_string(i));
  return EmbeddingTablef(ids, m);
}

double brute_score(const EmbeddingTablef& t, const std::string& cand, const std::vector<std::string>& hist) {
  const auto c = to_std(t.row(cand));
  double s = 0.0;
  for (const auto& h : hist) s += oracle::dot(c, to_std(t.row(h)));
  return s / static_cast<double>(hist.size());
}

Impression impression(std::vector<std::string> history, std::vector<std::string> candidates) {
  Impression imp;
  imp.impression_id = "1";
  imp.user_id = "U1";
  imp.history = std::move(history);
  for (auto& c : candidates) imp.candidates.push_back({c, 0});
  return imp;
}

}  // namespace

TEST(UserScore, MeanOfDots) {
  Eigen::RowVector2f c(1, 0);
  Eigen::Matrix2f h;
  h << 1, 0, 0, 1;
  EXPECT_DOUBLE_EQ(user_score(c, h), 0.5);
}

TEST(UserScore, UnitIdentity) {
  Eigen::RowVector3f e(0, 1, 0);
  EXPECT_DOUBLE_EQ(user_score(e, Eigen::RowVector3f(0, 1, 0)), 1.0);
}

TEST(UserScore, EmptyHistoryIsCold) {
  Eigen::RowVector2f c(1, 0);
  Eigen::Matrix<float, Eigen::Dynamic, 2> h(0, 2);
  try {
    user_score(c, h);
    FAIL();
  } catch (const Error& e) {
    EXPECT_NE(std::string(e.what()).find("cold user"), std::string::npos);
  }
}

TEST(UserScore, MatchesBruteForceOnRandomDim8) {
  std::mt19937_64 rng(4);
  std::normal_distribution<float> g;
  for (int trial = 0; trial < 500; ++trial) {
    Eigen::RowVectorXf c(8);
    Eigen::MatrixXf h(5, 8);
    for (int i = 0; i < 8; ++i) c(i) = g(rng);
    for (int r = 0; r < 5; ++r)
      for (int i = 0; i < 8; ++i) h(r, i) = g(rng);
    double want = 0.0;
    for (int r = 0; r < 5; ++r) want += oracle::dot(to_std(c), to_std(h.row(r)));
    EXPECT_NEAR(user_score(c, h), want / 5.0, 1e-6);
  }
}

TEST(UserScore, LinearAndPermutationInvariant) {
  std::mt19937_64 rng(5);
  std::normal_distribution<float> g;
  for (int trial = 0; trial < 200; ++trial) {
    const int n = 1 + static_cast<int>(rng() % 20);
    Eigen::RowVectorXf c(16);
    Eigen::MatrixXf h(n, 16);
    for (int i = 0; i < 16; ++i) c(i) = g(rng);
    for (int r = 0; r < n; ++r)
      for (int i = 0; i < 16; ++i) h(r, i) = g(rng);
    const double base = user_score(c, h);
    const float alpha = 0.25f;  // exact in binary, so the scaled floats are exact
    EXPECT_NEAR(user_score(Eigen::RowVectorXf(alpha * c), h), alpha * base, 1e-9);
    std::vector<int> perm(static_cast<std::size_t>(n));
    std::iota(perm.begin(), perm.end(), 0);
    std::shuffle(perm.begin(), perm.end(), rng);
    Eigen::MatrixXf hp(n, 16);
    for (int r = 0; r < n; ++r) hp.row(r) = h.row(perm[static_cast<std::size_t>(r)]);
    EXPECT_NEAR(user_score(c, hp), base, 1e-6);
  }
}

TEST(Ranks, TiesFollowCandidateOrder) {
  EXPECT_EQ(ranks_by_score(std::vector<double>{0.5, 0.9, 0.5, 0.1}), (std::vector<std::size_t>{2, 1, 3, 4}));
}

TEST(Ranks, InvariantUnderMonotoneTransform) {
  std::mt19937_64 rng(6);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> s(1 + rng() % 15);
    for (auto& x : s) x = static_cast<double>(rng() % 7) / 3.0 - 1.0;
    std::vector<double> t;
    for (double x : s) t.push_back(std::exp(3 * x) + 2);
    EXPECT_EQ(ranks_by_score(s), ranks_by_score(t));
    for (std::size_t i = 0; i < s.size(); ++i) EXPECT_EQ(ranks_by_score(s)[i], oracle::rank_of(s, i));
  }
}

TEST(ScoreImpression, TruncatesToMostRecentHistory) {
  const auto t = random_table(80, 12, 7);
  std::vector<std::string> history;
  for (int i = 0; i < 60; ++i) history.push_back("N" + std::to_string(i));
  const auto imp = impression(history, {"N70", "N71", "N72"});
  const auto scored = score_impression(imp, t, 50);
  const std::vector<std::string> last50(history.end() - 50, history.end());
  for (const auto& c : scored.candidates) EXPECT_NEAR(c.score, brute_score(t, c.news_id, last50), 1e-9);
}

TEST(ScoreImpression, ShortHistoryMatchesBruteForce) {
  const auto t = random_table(30, 8, 8);
  const std::vector<std::string> history{"N3", "N9", "N1"};
  const auto scored = score_impression(impression(history, {"N20", "N21"}), t, 50);
  for (const auto& c : scored.candidates) EXPECT_NEAR(c.score, brute_score(t, c.news_id, history), 1e-9);
}

TEST(ScoreImpression, EqualScoresRankInFileOrder) {
  Matrix m(3, 2);
  m << 1, 0, 0.5, 0.5, 0.5, 0.5;
  const EmbeddingTablef t({"h", "c1", "c2"}, m);
  const auto scored = score_impression(impression({"h"}, {"c2", "c1"}), t);
  EXPECT_EQ(scored.candidates[0].rank, 1u);
  EXPECT_EQ(scored.candidates[1].rank, 2u);
}

TEST(ScoreImpression, ColdPolicies) {
  const auto t = random_table(5, 4, 9);
  const auto imp = impression({}, {"N1", "N2"});
  const auto zero = score_impression(imp, t, 50, ColdPolicy::zero);
  EXPECT_TRUE(zero.cold);
  for (const auto& c : zero.candidates) EXPECT_EQ(c.score, 0.0);
  EXPECT_THROW(score_impression(imp, t, 50, ColdPolicy::error), Error);
}

TEST(ScoreImpression, MissingIdNamed) {
  const auto t = random_table(5, 4, 10);
  try {
    score_impression(impression({"N1"}, {"N2", "ghost"}), t);
    FAIL();
  } catch (const CoverageError& e) {
    EXPECT_NE(std::string(e.what()).find("ghost"), std::string::npos);
  }
}

TEST(ColdPolicy, ParseRoundTrip) {
  EXPECT_EQ(parse_cold_policy("zero"), ColdPolicy::zero);
  EXPECT_EQ(parse_cold_policy(to_string(ColdPolicy::error)), ColdPolicy::error);
  EXPECT_THROW(parse_cold_policy("skip"), Error);
}
