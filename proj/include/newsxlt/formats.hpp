#pragma once

#include <cstddef>
#include <iosfwd>
#include <set>
#include <string>
#include <vector>

#include "newsxlt/types.hpp"

namespace newsxlt {

struct NewsParseOptions {
  /// Accepted provenance tags; empty accepts any non-empty tag.
  std::set<std::string> allowed_sources;
};

/// One JSON object per line: {"id","text","lang","script","source"}.
/// Text is normalized on the way in. Blank lines are skipped.
Corpus parse_news_jsonl(std::istream& in, const NewsParseOptions& options = {});
std::size_t write_news_jsonl(const std::vector<NewsText>& items, std::ostream& out);

/// {"src_lang","src_script","tgt_lang","tgt_script","src_text","tgt_text","source"}
/// plus an optional "id". Pairs without an id are numbered by line.
std::vector<ParallelPair> parse_parallel_jsonl(std::istream& in, const NewsParseOptions& options = {});
std::size_t write_parallel_jsonl(const std::vector<ParallelPair>& pairs, std::ostream& out);

/// MIND behaviors.tsv: impression_id, user_id, time, history, candidates.
std::vector<Impression> parse_behaviors_tsv(std::istream& in);
std::size_t write_behaviors_tsv(const std::vector<Impression>& impressions, std::ostream& out);

std::size_t write_seq2seq_jsonl(const std::vector<Seq2SeqExample>& examples, std::ostream& out);
std::vector<Seq2SeqExample> parse_seq2seq_jsonl(std::istream& in);

/// Optional LID labels, "id<TAB>iso639_3" per line.
std::vector<std::pair<std::string, std::string>> parse_lid_labels(std::istream& in);

}  // namespace newsxlt
