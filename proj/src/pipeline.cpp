#include "newsxlt/pipeline.hpp"

#include <algorithm>
#include <numeric>
#include <span>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "newsxlt/error.hpp"
#include "newsxlt/parallel.hpp"
#include "newsxlt/rng.hpp"

namespace newsxlt {

double PipelineConfig::k_for(const std::string& source) const {
  auto it = k_percent.find(source);
  return it == k_percent.end() ? default_k_percent : it->second;
}

void PipelineConfig::validate() const {
  if (minhash_permutations == 0) throw Error("minhash_permutations must be positive");
  if (lsh_bands * lsh_rows != minhash_permutations)
    throw Error("lsh_bands * lsh_rows must equal minhash_permutations");
  if (!(near_dup_threshold >= 0.0 && near_dup_threshold <= 1.0)) throw Error("near_dup_threshold must be in [0, 1]");
  if (shingle_n == 0) throw Error("shingle_n must be positive");
  auto check_k = [](double k) {
    if (!(k >= 0.0 && k < 100.0)) throw Error("K percent must be in [0, 100)");
  };
  check_k(default_k_percent);
  for (const auto& [_, k] : k_percent) check_k(k);
}

const char* stage_name(Stage s) noexcept {
  switch (s) {
    case Stage::input: return "input";
    case Stage::exact_dedup: return "after_exact_dedup";
    case Stage::script_filter: return "after_script_filter";
    case Stage::lid_filter: return "after_lid_filter";
    case Stage::length_filter: return "after_length_filter";
    case Stage::near_dedup: return "after_near_dedup";
  }
  return "?";
}

StageCounts PipelineStats::total() const {
  StageCounts t{};
  for (const auto& [_, c] : cells)
    for (std::size_t s = 0; s < kStageCount; ++s) t[s] += c[s];
  return t;
}

std::map<std::string, StageCounts> PipelineStats::per_key() const {
  std::map<std::string, StageCounts> out;
  for (const auto& [cell, c] : cells)
    for (std::size_t s = 0; s < kStageCount; ++s) out[cell.first][s] += c[s];
  return out;
}

std::map<std::string, StageCounts> PipelineStats::per_source() const {
  std::map<std::string, StageCounts> out;
  for (const auto& [cell, c] : cells)
    for (std::size_t s = 0; s < kStageCount; ++s) out[cell.second][s] += c[s];
  return out;
}

std::string PipelineStats::to_json() const {
  using ordered_json = nlohmann::ordered_json;
  auto counts = [](const StageCounts& c) {
    ordered_json o;
    for (std::size_t s = 0; s < kStageCount; ++s) o[stage_name(static_cast<Stage>(s))] = c[s];
    return o;
  };
  ordered_json root;
  root["total"] = counts(total());
  ordered_json keys = ordered_json::object();
  for (const auto& [k, c] : per_key()) keys[k] = counts(c);
  root["per_key"] = keys;
  ordered_json sources = ordered_json::object();
  for (const auto& [k, c] : per_source()) sources[k] = counts(c);
  root["per_source"] = sources;
  ordered_json list = ordered_json::array();
  for (const auto& [cell, c] : cells) {
    ordered_json o;
    o["key"] = cell.first;
    o["source"] = cell.second;
    o["counts"] = counts(c);
    list.push_back(o);
  }
  root["cells"] = list;
  root["lid"] = {{"labels_present", lid_labels_present},
                 {"unlabeled", lid_unlabeled},
                 {"unknown_ids", lid_unknown_ids}};
  return root.dump(2);
}

namespace {

// Stage kernels over positions 0..n-1 of a shard. Each returns the kept
// positions in ascending order.

template <typename TextOf>
std::vector<std::size_t> exact_dedup_positions(std::size_t n, TextOf&& text_of) {
  std::unordered_set<std::string_view> seen;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i)
    if (seen.insert(text_of(i)).second) kept.push_back(i);
  return kept;
}

template <typename LenIdOf>
std::vector<std::size_t> length_filter_positions(std::size_t n, double k_percent, LenIdOf&& len_id_of) {
  // Small epsilon keeps e.g. 15% of 20 at exactly 3 despite binary rounding.
  const auto removed = static_cast<std::size_t>(std::floor(k_percent / 100.0 * static_cast<double>(n) + 1e-9));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return len_id_of(a) < len_id_of(b); });
  std::vector<bool> drop(n, false);
  for (std::size_t i = 0; i < std::min(removed, n); ++i) drop[order[i]] = true;
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i)
    if (!drop[i]) kept.push_back(i);
  return kept;
}

class UnionFind {
 public:
  explicit UnionFind(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  // Root is always the smallest index of the component.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

template <typename T>
std::vector<T> select(const std::vector<T>& items, const std::vector<std::size_t>& kept) {
  std::vector<T> out;
  out.reserve(kept.size());
  for (std::size_t i : kept) out.push_back(items[i]);
  return out;
}

NearDedupConfig near_config(const PipelineConfig& config) {
  return {config.minhash(), config.near_dup_threshold, config.lsh_bands, config.lsh_rows};
}

}  // namespace

std::vector<NewsText> exact_dedup(const std::vector<NewsText>& items) {
  return select(items, exact_dedup_positions(items.size(), [&](std::size_t i) -> std::string_view {
                  return items[i].text;
                }));
}

std::vector<NewsText> script_filter(const std::vector<NewsText>& items, const LanguageKey& key,
                                    std::size_t min_letters) {
  std::vector<NewsText> out;
  for (const auto& item : items)
    if (matches_script(item.text, key.script(), min_letters)) out.push_back(item);
  return out;
}

LidResult lid_filter(const std::vector<NewsText>& items, const LanguageKey& key, const LidLabels* labels) {
  LidResult result;
  for (const auto& item : items) {
    if (labels) {
      auto it = labels->find(item.id);
      if (it != labels->end()) {
        if (it->second == key.lang()) result.items.push_back(item);
        continue;
      }
    }
    ++result.unlabeled;
    result.items.push_back(item);
  }
  return result;
}

std::vector<NewsText> length_filter(const std::vector<NewsText>& items, double k_percent) {
  return select(items, length_filter_positions(items.size(), k_percent, [&](std::size_t i) {
                  return std::tie(items[i].char_len, items[i].id);
                }));
}

std::vector<std::size_t> near_dedup_keep(const std::vector<std::string>& texts, const NearDedupConfig& config,
                                         unsigned threads) {
  const std::size_t n = texts.size();
  if (config.bands * config.rows != config.minhash.permutations)
    throw Error("lsh bands * rows must equal the permutation count");
  const MinHasher hasher(config.minhash);
  std::vector<MinHashSignature> sigs(n);
  parallel_for(n, threads, [&](std::size_t i) { sigs[i] = hasher.signature(texts[i]); });

  UnionFind uf(n);
  for (std::size_t band = 0; band < config.bands; ++band) {
    std::unordered_map<std::uint64_t, std::vector<std::size_t>> buckets;
    for (std::size_t i = 0; i < n; ++i) {
      std::uint64_t h = band;
      for (std::size_t r = 0; r < config.rows; ++r) h = splitmix64(h ^ sigs[i][band * config.rows + r]);
      buckets[h].push_back(i);
    }
    for (const auto& [_, members] : buckets) {
      for (std::size_t x = 1; x < members.size(); ++x)
        for (std::size_t y = 0; y < x; ++y) {
          const std::size_t a = members[y], b = members[x];
          if (uf.find(a) == uf.find(b)) continue;
          if (estimated_jaccard(sigs[a], sigs[b]) >= config.threshold) uf.unite(a, b);
        }
    }
  }
  std::vector<std::size_t> kept;
  for (std::size_t i = 0; i < n; ++i)
    if (uf.find(i) == i) kept.push_back(i);
  return kept;
}

std::vector<NewsText> near_dedup(const std::vector<NewsText>& items, const PipelineConfig& config, unsigned threads) {
  std::vector<std::string> texts;
  texts.reserve(items.size());
  for (const auto& item : items) texts.push_back(item.text);
  return select(items, near_dedup_keep(texts, near_config(config), threads));
}

namespace {

// Drives the five stages over one shard. `Traits` adapts news items and
// parallel pairs to the stage kernels.
template <typename Item, typename Traits>
struct ShardOutput {
  std::vector<std::size_t> kept;  // shard-local positions, ascending
  std::map<std::string, StageCounts> per_source;
  std::size_t unlabeled = 0;
};

template <typename Item, typename Traits>
ShardOutput<Item, Traits> run_shard(const std::vector<const Item*>& shard, const PipelineConfig& config,
                                    const LidLabels* labels, unsigned threads) {
  ShardOutput<Item, Traits> out;
  std::vector<std::size_t> alive(shard.size());
  std::iota(alive.begin(), alive.end(), 0);
  auto record = [&](Stage stage) {
    for (std::size_t i : alive) ++out.per_source[Traits::source(*shard[i])][static_cast<std::size_t>(stage)];
  };
  auto compose = [&](const std::vector<std::size_t>& local) {
    std::vector<std::size_t> next;
    next.reserve(local.size());
    for (std::size_t j : local) next.push_back(alive[j]);
    alive = std::move(next);
  };
  for (const auto* item : shard) out.per_source[Traits::source(*item)];
  record(Stage::input);

  compose(exact_dedup_positions(alive.size(), [&](std::size_t j) -> std::string_view {
    return Traits::dedup_text(*shard[alive[j]]);
  }));
  record(Stage::exact_dedup);

  {
    std::vector<std::size_t> local;
    for (std::size_t j = 0; j < alive.size(); ++j)
      if (Traits::script_ok(*shard[alive[j]], config.min_letters)) local.push_back(j);
    compose(local);
  }
  record(Stage::script_filter);

  {
    std::vector<std::size_t> local;
    for (std::size_t j = 0; j < alive.size(); ++j)
      if (Traits::lid_ok(*shard[alive[j]], labels, out.unlabeled)) local.push_back(j);
    compose(local);
  }
  record(Stage::lid_filter);

  {
    std::map<std::string, std::vector<std::size_t>> by_source;
    for (std::size_t j = 0; j < alive.size(); ++j) by_source[Traits::source(*shard[alive[j]])].push_back(j);
    std::vector<std::size_t> local;
    for (const auto& [source, members] : by_source) {
      const auto kept = length_filter_positions(members.size(), config.k_for(source), [&](std::size_t m) {
        const Item& item = *shard[alive[members[m]]];
        return std::make_tuple(Traits::length(item), std::string_view(Traits::id(item)));
      });
      for (std::size_t m : kept) local.push_back(members[m]);
    }
    std::sort(local.begin(), local.end());
    compose(local);
  }
  record(Stage::length_filter);

  {
    std::vector<std::string> texts;
    texts.reserve(alive.size());
    for (std::size_t i : alive) texts.emplace_back(Traits::dedup_text(*shard[i]));
    compose(near_dedup_keep(texts, near_config(config), threads));
  }
  record(Stage::near_dedup);

  out.kept = std::move(alive);
  return out;
}

struct NewsTraits {
  static std::string_view dedup_text(const NewsText& t) { return t.text; }
  static const std::string& source(const NewsText& t) { return t.source; }
  static bool script_ok(const NewsText& t, std::size_t min_letters) {
    return matches_script(t.text, t.key.script(), min_letters);
  }
  static bool lid_ok(const NewsText& t, const LidLabels* labels, std::size_t& unlabeled) {
    if (labels) {
      auto it = labels->find(t.id);
      if (it != labels->end()) return it->second == t.key.lang();
    }
    ++unlabeled;
    return true;
  }
  static std::size_t length(const NewsText& t) { return t.char_len; }
  static const std::string& id(const NewsText& t) { return t.id; }
};

struct PairTraits {
  static std::string_view dedup_text(const ParallelPair& p) { return p.src.text; }
  static const std::string& source(const ParallelPair& p) { return p.source; }
  static bool script_ok(const ParallelPair& p, std::size_t min_letters) {
    return NewsTraits::script_ok(p.src, min_letters) && NewsTraits::script_ok(p.tgt, min_letters);
  }
  static bool lid_ok(const ParallelPair& p, const LidLabels* labels, std::size_t& unlabeled) {
    std::size_t missing = 0;
    const bool ok = NewsTraits::lid_ok(p.src, labels, missing) && NewsTraits::lid_ok(p.tgt, labels, missing);
    if (missing) ++unlabeled;
    return ok;
  }
  static std::size_t length(const ParallelPair& p) { return p.src.char_len; }
  static const std::string& id(const ParallelPair& p) { return p.src.id; }
};

template <typename Item, typename Traits, typename KeyOf, typename TagOf>
std::pair<std::vector<std::size_t>, PipelineStats> run_sharded(const std::vector<Item>& items,
                                                               const PipelineConfig& config, const LidLabels* labels,
                                                               unsigned threads, KeyOf&& key_of, TagOf&& tag_of) {
  config.validate();
  using Key = std::decay_t<decltype(key_of(items.front()))>;
  std::map<Key, std::vector<std::size_t>> groups;
  for (std::size_t i = 0; i < items.size(); ++i) groups[key_of(items[i])].push_back(i);

  std::vector<const std::vector<std::size_t>*> shard_indices;
  std::vector<Key> shard_keys;
  for (const auto& [key, idx] : groups) {
    shard_keys.push_back(key);
    shard_indices.push_back(&idx);
  }
  const unsigned inner_threads = shard_indices.size() == 1 ? threads : 1;
  std::vector<ShardOutput<Item, Traits>> outputs(shard_indices.size());
  parallel_for(shard_indices.size(), threads, [&](std::size_t s) {
    std::vector<const Item*> shard;
    shard.reserve(shard_indices[s]->size());
    for (std::size_t i : *shard_indices[s]) shard.push_back(&items[i]);
    outputs[s] = run_shard<Item, Traits>(shard, config, labels, inner_threads);
  });

  PipelineStats stats;
  stats.lid_labels_present = labels != nullptr;
  std::vector<std::size_t> kept;
  for (std::size_t s = 0; s < outputs.size(); ++s) {
    for (std::size_t local : outputs[s].kept) kept.push_back((*shard_indices[s])[local]);
    for (const auto& [source, counts] : outputs[s].per_source) stats.cells[{tag_of(shard_keys[s]), source}] = counts;
    stats.lid_unlabeled += outputs[s].unlabeled;
  }
  std::sort(kept.begin(), kept.end());
  return {std::move(kept), std::move(stats)};
}

}  // namespace

PipelineResult run_pipeline(const Corpus& corpus, const PipelineConfig& config, const LidLabels* labels,
                            unsigned threads) {
  const auto& items = corpus.items();
  auto [kept, stats] = run_sharded<NewsText, NewsTraits>(
      items, config, labels, threads, [](const NewsText& t) { return t.key; },
      [](const LanguageKey& k) { return k.tag(); });
  if (labels) {
    std::unordered_set<std::string_view> ids;
    for (const auto& item : items) ids.insert(item.id);
    for (const auto& [id, _] : *labels) stats.lid_unknown_ids += ids.count(id) == 0;
  }
  PipelineResult result;
  result.stats = std::move(stats);
  for (std::size_t i : kept) result.corpus.push_back(items[i]);
  return result;
}

ParallelPipelineResult run_parallel_pipeline(const std::vector<ParallelPair>& pairs, const PipelineConfig& config,
                                             const LidLabels* labels, unsigned threads) {
  auto [kept, stats] = run_sharded<ParallelPair, PairTraits>(
      pairs, config, labels, threads, [](const ParallelPair& p) { return p.pair_key(); },
      [](const PairKey& k) { return pair_tag(k); });
  if (labels) {
    std::unordered_set<std::string_view> ids;
    for (const auto& p : pairs) {
      ids.insert(p.src.id);
      ids.insert(p.tgt.id);
    }
    for (const auto& [id, _] : *labels) stats.lid_unknown_ids += ids.count(id) == 0;
  }
  ParallelPipelineResult result;
  result.stats = std::move(stats);
  for (std::size_t i : kept) result.pairs.push_back(pairs[i]);
  return result;
}

}  // namespace newsxlt
