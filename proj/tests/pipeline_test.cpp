#include <gtest/gtest.h>

#include <random>

#include "fixtures.hpp"
#include "newsxlt/error.hpp"
#include "newsxlt/pipeline.hpp"
#include "newsxlt/text.hpp"
#include "oracles.hpp"

using namespace newsxlt;
using testing_util::news;
using testing_util::random_words;

namespace {

std::vector<std::string> texts_of(const std::vector<NewsText>& items) {
  std::vector<std::string> out;
  for (const auto& i : items) out.push_back(i.text);
  return out;
}

std::vector<std::string> ids_of(const std::vector<NewsText>& items) {
  std::vector<std::string> out;
  for (const auto& i : items) out.push_back(i.id);
  return out;
}

const LanguageKey kEng("eng", "Latn");

}  // namespace

TEST(ExactDedup, KeepsFirstOccurrence) {
  const auto out = exact_dedup({news("1", "a"), news("2", "a"), news("3", "b")});
  EXPECT_EQ(ids_of(out), (std::vector<std::string>{"1", "3"}));
}

TEST(ExactDedup, NormalizedCompositionVariantsCollapse) {
  const std::string precomposed = normalize_text("caf\xC3\xA9");
  const std::string combining = normalize_text("cafe\xCC\x81");
  ASSERT_EQ(precomposed, combining);
  EXPECT_EQ(exact_dedup({news("1", precomposed), news("2", combining)}).size(), 1u);
}

TEST(ExactDedup, DistinctInputUnchanged) {
  const std::vector<NewsText> in{news("1", "a"), news("2", "b"), news("3", "c")};
  EXPECT_EQ(exact_dedup(in), in);
}

TEST(ScriptFilter, DropsTotalMismatch) {
  const LanguageKey fra("fra", "Latn");
  EXPECT_TRUE(script_filter({news("1", "\xD9\x85\xD8\xB1\xD8\xAD\xD8\xA8\xD8\xA7", "fra")}, fra).empty());
}

TEST(ScriptFilter, MajorityOfLettersWins) {
  // 6 Latin + 4 Cyrillic letters: 60% Latin.
  const std::string mixed = "abcdef \xD0\xB0\xD0\xB1\xD0\xB2\xD0\xB3 123 !";
  const LanguageKey latn("srp", "Latn"), cyrl("srp", "Cyrl");
  EXPECT_EQ(script_filter({news("1", mixed, "srp")}, latn).size(), 1u);
  EXPECT_TRUE(script_filter({news("1", mixed, "srp", "Cyrl")}, cyrl).empty());
  EXPECT_EQ(dominant_script(mixed), "Latn");
}

TEST(ScriptFilter, ExactHalfIsNotAMajority) {
  const std::string mixed = "ab \xD0\xB0\xD0\xB1";
  EXPECT_EQ(dominant_script(mixed), "");
  EXPECT_FALSE(matches_script(mixed, "Latn"));
}

TEST(ScriptFilter, NoLettersDropped) { EXPECT_TRUE(script_filter({news("1", "12345 !!!")}, kEng).empty()); }

TEST(ScriptFilter, MinLettersGuard) {
  EXPECT_EQ(script_filter({news("1", "ab 12")}, kEng, 2).size(), 1u);
  EXPECT_TRUE(script_filter({news("1", "ab 12")}, kEng, 3).empty());
}

TEST(ScriptFilter, CompositeJapaneseScript) {
  // Hiragana + Han under Jpan.
  EXPECT_TRUE(matches_script("\xE3\x81\x93\xE3\x82\x8C\xE6\x97\xA5\xE6\x9C\xAC", "Jpan"));
  EXPECT_TRUE(matches_script("\xE6\x97\xA5\xE6\x9C\xAC", "Hans"));
}

TEST(LidFilter, DropsMismatchedLabel) {
  LidLabels labels{{"1", "fra"}};
  const auto r = lid_filter({news("1", "hello there")}, kEng, &labels);
  EXPECT_TRUE(r.items.empty());
}

TEST(LidFilter, AbsentLabelsPassThrough) {
  const auto r = lid_filter({news("1", "a"), news("2", "b")}, kEng, nullptr);
  EXPECT_EQ(r.items.size(), 2u);
  EXPECT_EQ(r.unlabeled, 2u);
}

TEST(LidFilter, UnlabeledItemsPass) {
  LidLabels labels{{"1", "eng"}, {"3", "eng"}};
  const auto r = lid_filter({news("1", "a"), news("2", "b"), news("3", "c")}, kEng, &labels);
  EXPECT_EQ(r.items.size(), 3u);
  EXPECT_EQ(r.unlabeled, 1u);
}

TEST(LengthFilter, FloorOfFifteenPercent) {
  std::vector<NewsText> items;
  for (int i = 0; i < 10; ++i) items.push_back(news("n" + std::to_string(i), std::string(5 + i, 'x')));
  const auto out = length_filter(items, 15.0);
  ASSERT_EQ(out.size(), 9u);
  EXPECT_EQ(out.front().id, "n1");
}

TEST(LengthFilter, ZeroPercentIsIdentity) {
  std::vector<NewsText> items{news("a", "xx"), news("b", "x")};
  EXPECT_EQ(length_filter(items, 0.0), items);
}

TEST(LengthFilter, TiesBrokenById) {
  std::vector<NewsText> items{news("b", "xxxxx"), news("a", "yyyyy"), news("c", "zzzzzzzz")};
  // 34% of 3 -> 1 removal.
  EXPECT_EQ(ids_of(length_filter(items, 34.0)), (std::vector<std::string>{"b", "c"}));
}

TEST(LengthFilter, KeepsInputOrder) {
  std::vector<NewsText> items;
  std::mt19937 rng(3);
  for (int i = 0; i < 50; ++i) items.push_back(news("n" + std::to_string(i), std::string(1 + rng() % 30, 'x')));
  const auto out = length_filter(items, 20.0);
  EXPECT_EQ(out.size(), 40u);
  std::size_t pos = 0;
  for (const auto& o : out) {
    while (pos < items.size() && items[pos].id != o.id) ++pos;
    ASSERT_LT(pos, items.size());
  }
}

TEST(NearDedup, IdenticalTextsCollapse) {
  PipelineConfig cfg;
  const auto out = near_dedup({news("1", "same words in both texts here"), news("2", "same words in both texts here")}, cfg);
  EXPECT_EQ(ids_of(out), (std::vector<std::string>{"1"}));
}

TEST(NearDedup, UnrelatedTextsKept) {
  PipelineConfig cfg;
  std::mt19937_64 rng(8);
  EXPECT_EQ(near_dedup({news("1", random_words(rng, 50)), news("2", random_words(rng, 50))}, cfg).size(), 2u);
}

TEST(NearDedup, PlantedNearDuplicateDetectedAcrossSeeds) {
  std::mt19937_64 rng(17);
  const std::string base = random_words(rng, 205, 100000);
  std::istringstream ss(base);
  std::vector<std::string> tokens;
  for (std::string t; ss >> t;) tokens.push_back(t);
  tokens[100] = "planted";
  std::string variant;
  for (std::size_t i = 0; i < tokens.size(); ++i) variant += (i ? " " : "") + tokens[i];
  const double exact = oracle::jaccard(oracle::word_shingles(base, 5), oracle::word_shingles(variant, 5));
  ASSERT_GE(exact, 0.95);
  ASSERT_GE(oracle::word_shingles(base, 5).size(), 200u);

  int detected = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    PipelineConfig cfg;
    cfg.seed = seed;
    detected += near_dedup({news("1", base), news("2", variant)}, cfg).size() == 1;
  }
  EXPECT_GE(detected, 99);
}

TEST(NearDedup, KeepsEarliestOfTransitiveGroup) {
  std::mt19937_64 rng(23);
  const std::string base = random_words(rng, 300, 100000);
  std::vector<NewsText> items{news("x", random_words(rng, 40)), news("a", base + " tail1"),
                              news("b", base + " tail2"), news("c", base + " tail3")};
  PipelineConfig cfg;
  EXPECT_EQ(ids_of(near_dedup(items, cfg)), (std::vector<std::string>{"x", "a"}));
}

namespace {

// Ten items, one exact duplicate and one Cyrillic text under eng/Latn.
Corpus ten_item_fixture() {
  std::mt19937_64 rng(1);
  Corpus c;
  for (int i = 0; i < 8; ++i) c.push_back(news("n" + std::to_string(i), random_words(rng, 30), "eng", "Latn", "wmt"));
  c.push_back(news("dup", c.items()[2].text, "eng", "Latn", "wmt"));
  c.push_back(news("cyr", "\xD0\xBD\xD0\xBE\xD0\xB2\xD0\xBE\xD1\x81\xD1\x82\xD0\xB8 \xD0\xB4\xD0\xBD\xD1\x8F", "eng",
                   "Latn", "wmt"));
  return c;
}

}  // namespace

TEST(RunPipeline, TenItemFixture) {
  const auto r = run_pipeline(ten_item_fixture(), PipelineConfig{});
  EXPECT_EQ(r.corpus.size(), 8u);
  const auto t = r.stats.total();
  EXPECT_EQ(t[static_cast<std::size_t>(Stage::input)], 10u);
  EXPECT_EQ(t[static_cast<std::size_t>(Stage::exact_dedup)], 9u);
  EXPECT_EQ(t[static_cast<std::size_t>(Stage::script_filter)], 8u);
  EXPECT_EQ(t[static_cast<std::size_t>(Stage::near_dedup)], 8u);
  EXPECT_FALSE(r.stats.lid_labels_present);
  EXPECT_EQ(r.stats.lid_unlabeled, 8u);
}

TEST(RunPipeline, EmptyCorpus) {
  const auto r = run_pipeline(Corpus{}, PipelineConfig{});
  EXPECT_TRUE(r.corpus.empty());
  EXPECT_EQ(r.stats.total(), StageCounts{});
}

TEST(RunPipeline, SecondRunOnFixtureRemovesNothing) {
  const auto once = run_pipeline(ten_item_fixture(), PipelineConfig{});
  const auto twice = run_pipeline(once.corpus, PipelineConfig{});
  EXPECT_EQ(twice.corpus.items(), once.corpus.items());
}

TEST(RunPipeline, LengthStageRemovesAgainOnLargerShards) {
  // The K% rule is relative to the shard size, so a shard that still holds
  // at least 100/K items loses floor(K * N / 100) more on a re-run.
  std::mt19937_64 rng(2);
  Corpus c;
  for (int i = 0; i < 40; ++i) c.push_back(news("n" + std::to_string(i), random_words(rng, 10 + i), "eng", "Latn", "wikinews"));
  const auto once = run_pipeline(c, PipelineConfig{});
  EXPECT_EQ(once.corpus.size(), 34u);
  const auto twice = run_pipeline(once.corpus, PipelineConfig{});
  EXPECT_EQ(twice.corpus.size(), 29u);
}

TEST(RunPipeline, OutputKeepsInputOrderAcrossKeys) {
  std::mt19937_64 rng(4);
  Corpus c;
  for (int i = 0; i < 30; ++i) {
    const bool fr = i % 3 == 0;
    c.push_back(news("n" + std::to_string(i), random_words(rng, 20), fr ? "fra" : "eng", "Latn", "wmt"));
  }
  const auto r = run_pipeline(c, PipelineConfig{});
  ASSERT_EQ(r.corpus.size(), 30u);
  for (int i = 0; i < 30; ++i) EXPECT_EQ(r.corpus.items()[static_cast<std::size_t>(i)].id, "n" + std::to_string(i));
}

TEST(RunPipeline, DeterministicAcrossThreadCounts) {
  std::mt19937_64 rng(6);
  Corpus c;
  const char* langs[] = {"eng", "fra", "deu", "spa"};
  for (int i = 0; i < 400; ++i) {
    std::string text = random_words(rng, 15 + rng() % 40, 3000);
    if (i % 17 == 0 && i > 0) text = c.items()[static_cast<std::size_t>(i - 1)].text;
    c.push_back(news("n" + std::to_string(i), text, langs[i % 4], "Latn", i % 5 == 0 ? "wikinews" : "wmt"));
  }
  const auto base = run_pipeline(c, PipelineConfig{}, nullptr, 1);
  for (unsigned t : {2u, 4u, 8u}) {
    const auto r = run_pipeline(c, PipelineConfig{}, nullptr, t);
    EXPECT_EQ(r.corpus.items(), base.corpus.items());
    EXPECT_EQ(r.stats.to_json(), base.stats.to_json());
  }
}

TEST(RunPipeline, StatsMonotoneAndLabelsCounted) {
  std::mt19937_64 rng(9);
  Corpus c;
  for (int i = 0; i < 60; ++i) c.push_back(news("n" + std::to_string(i), random_words(rng, 12), i % 2 ? "eng" : "fra"));
  LidLabels labels{{"n0", "fra"}, {"n1", "deu"}, {"ghost", "eng"}};
  const auto r = run_pipeline(c, PipelineConfig{}, &labels);
  EXPECT_EQ(r.stats.lid_unknown_ids, 1u);
  EXPECT_EQ(r.stats.lid_unlabeled, 58u);
  for (const auto& [_, counts] : r.stats.cells)
    for (std::size_t s = 1; s < kStageCount; ++s) EXPECT_LE(counts[s], counts[s - 1]);
  const auto t = r.stats.total();
  EXPECT_EQ(t[static_cast<std::size_t>(Stage::lid_filter)] + 1, t[static_cast<std::size_t>(Stage::script_filter)]);
}

TEST(RunPipeline, StatsJsonHasStagesPerKeyAndSource) {
  const auto r = run_pipeline(ten_item_fixture(), PipelineConfig{});
  const auto json = r.stats.to_json();
  EXPECT_NE(json.find("\"per_key\""), std::string::npos);
  EXPECT_NE(json.find("\"eng_Latn\""), std::string::npos);
  EXPECT_NE(json.find("\"per_source\""), std::string::npos);
  EXPECT_NE(json.find("\"after_near_dedup\": 8"), std::string::npos);
}

TEST(PipelineConfig, Validation) {
  PipelineConfig cfg;
  EXPECT_NO_THROW(cfg.validate());
  cfg.lsh_bands = 8;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = PipelineConfig{};
  cfg.near_dup_threshold = 1.5;
  EXPECT_THROW(cfg.validate(), Error);
  cfg = PipelineConfig{};
  cfg.k_percent["wmt"] = 100.0;
  EXPECT_THROW(cfg.validate(), Error);
  EXPECT_EQ(PipelineConfig{}.k_for("wikinews"), 15.0);
  EXPECT_EQ(PipelineConfig{}.k_for("mafand"), 3.0);
}

TEST(ParallelPipeline, DedupKeysOnSourceSide) {
  auto pair = [](const std::string& id, const std::string& src, const std::string& tgt) {
    ParallelPair p;
    p.id = id;
    p.source = "wmt";
    p.src = news(id + ".src", src, "eng");
    p.tgt = news(id + ".tgt", tgt, "fra");
    return p;
  };
  std::mt19937_64 rng(12);
  const std::string s1 = random_words(rng, 20), s2 = random_words(rng, 20), s3 = random_words(rng, 20);
  const std::vector<ParallelPair> pairs{pair("a", s1, "un"), pair("b", s1, "deux"), pair("c", s2, "un"),
                                        pair("d", s3, "trois")};
  const auto r = run_parallel_pipeline(pairs, PipelineConfig{});
  ASSERT_EQ(r.pairs.size(), 3u);
  EXPECT_EQ(r.pairs[0].id, "a");
  EXPECT_EQ(r.pairs[1].id, "c");
  EXPECT_EQ(r.pairs[2].id, "d");
}

TEST(ParallelPipeline, ScriptCheckedOnBothSides) {
  ParallelPair p;
  p.source = "wmt";
  p.src = news("x.src", "hello there", "eng");
  p.tgt = news("x.tgt", "hello there", "rus", "Cyrl");
  const auto r = run_parallel_pipeline({p}, PipelineConfig{});
  EXPECT_TRUE(r.pairs.empty());
}
