#include "newsxlt/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "newsxlt/text.hpp"

namespace newsxlt {

const char* to_string(SampleMode m) noexcept {
  switch (m) {
    case SampleMode::dae: return "dae";
    case SampleMode::mt: return "mt";
    case SampleMode::dae_plus_mt: return "dae_plus_mt";
    case SampleMode::dae_then_mt: return "dae_then_mt";
  }
  return "?";
}

SampleMode parse_sample_mode(const std::string& s) {
  if (s == "dae") return SampleMode::dae;
  if (s == "mt") return SampleMode::mt;
  if (s == "dae_plus_mt" || s == "dae+mt") return SampleMode::dae_plus_mt;
  if (s == "dae_then_mt" || s == "dae->mt") return SampleMode::dae_then_mt;
  throw Error("unknown sampling mode '" + s + "'");
}

void SamplerConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("alpha must be in (0, 1]");
  if (!(deletion_ratio > 0.0 && deletion_ratio < 1.0)) throw Error("deletion_ratio must be in (0, 1)");
  if (min_count < 1) throw Error("min_count must be at least 1");
  if (!(phase_split >= 0.0 && phase_split <= 1.0)) throw Error("phase_split must be in [0, 1]");
  if (batch_size < 1) throw Error("batch_size must be at least 1");
}

std::vector<NewsText> sample_texts(const Corpus& corpus, const LanguageDistribution<LanguageKey>& dist, std::size_t n,
                                   std::uint64_t seed) {
  std::vector<std::vector<std::size_t>> members;
  for (const auto& key : dist.keys) {
    members.push_back(corpus.indices_of(key));
    if (members.back().empty()) throw Error("distribution key " + key.tag() + " has no texts in the corpus");
  }
  Rng rng(seed);
  std::vector<NewsText> out;
  out.reserve(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& pool = members[dist.draw(rng)];
    out.push_back(corpus.items()[pool[rng.uniform_index(pool.size())]]);
  }
  return out;
}

std::vector<std::string> corrupt_delete(const std::vector<std::string>& tokens, double ratio, Rng& rng) {
  const std::size_t l = tokens.size();
  if (l == 0) throw Error("cannot corrupt an empty token sequence");
  const auto by_ratio = static_cast<std::size_t>(std::floor(ratio * static_cast<double>(l) + 1e-9));
  const std::size_t d = std::min(by_ratio, l - 1);
  std::vector<std::size_t> positions(l);
  std::iota(positions.begin(), positions.end(), 0);
  std::vector<bool> deleted(l, false);
  for (std::size_t i = 0; i < d; ++i) {
    const std::size_t j = i + rng.uniform_index(l - i);
    std::swap(positions[i], positions[j]);
    deleted[positions[i]] = true;
  }
  std::vector<std::string> out;
  out.reserve(l - d);
  for (std::size_t i = 0; i < l; ++i)
    if (!deleted[i]) out.push_back(tokens[i]);
  return out;
}

Seq2SeqExample make_dae_example(const NewsText& text, double ratio, Rng& rng) {
  if (text.text.empty()) throw Error("cannot build a DAE example from empty text");
  Seq2SeqExample ex;
  ex.input = join(corrupt_delete(split_whitespace(text.text), ratio, rng));
  ex.target = text.text;
  ex.objective = Objective::dae;
  ex.lang = text.key;
  return ex;
}

Seq2SeqExample make_mt_example(const ParallelPair& pair, Direction direction) {
  const bool forward = direction == Direction::src_to_tgt;
  const NewsText& from = forward ? pair.src : pair.tgt;
  const NewsText& to = forward ? pair.tgt : pair.src;
  Seq2SeqExample ex;
  ex.input = from.text;
  ex.target = to.text;
  ex.objective = Objective::mt;
  ex.lang = PairKey{from.key, to.key};
  return ex;
}

namespace {

// Draws (key ~ smoothed distribution, item uniform within key).
template <typename K>
class SmoothedPool {
 public:
  SmoothedPool(const std::map<K, std::vector<std::size_t>>& groups, double alpha, std::size_t min_count) {
    std::map<K, std::size_t> counts;
    for (const auto& [key, members] : groups) counts[key] = members.size();
    dist_ = language_weights(counts, alpha, min_count);
    for (const auto& key : dist_.keys) members_.push_back(&groups.at(key));
  }

  std::size_t draw(Rng& rng) const {
    const auto& pool = *members_[dist_.draw(rng)];
    return pool[rng.uniform_index(pool.size())];
  }

 private:
  LanguageDistribution<K> dist_;
  std::vector<const std::vector<std::size_t>*> members_;
};

}  // namespace

Schedule schedule_examples(const Corpus& mono, const std::vector<ParallelPair>& parallel,
                           const SamplerConfig& config) {
  config.validate();
  const std::size_t n = config.n_examples;
  const bool needs_mono = config.mode == SampleMode::dae ||
                          (config.mode == SampleMode::dae_then_mt &&
                           static_cast<std::size_t>(std::floor(config.phase_split * static_cast<double>(n))) > 0);
  const bool needs_parallel = config.mode != SampleMode::dae;
  Schedule schedule;
  if (n == 0) return schedule;
  if (needs_mono && mono.empty()) throw Error(std::string(to_string(config.mode)) + " mode requires monolingual data");
  if (needs_parallel && parallel.empty())
    throw Error(std::string(to_string(config.mode)) + " mode requires parallel data");

  std::map<LanguageKey, std::vector<std::size_t>> mono_groups;
  for (std::size_t i = 0; i < mono.size(); ++i) mono_groups[mono.items()[i].key].push_back(i);
  std::map<PairKey, std::vector<std::size_t>> pair_groups;
  for (std::size_t i = 0; i < parallel.size(); ++i) pair_groups[parallel[i].pair_key()].push_back(i);

  std::optional<SmoothedPool<LanguageKey>> mono_pool;
  std::optional<SmoothedPool<PairKey>> pair_pool;
  if (needs_mono) mono_pool.emplace(mono_groups, config.alpha, config.min_count);
  if (needs_parallel) pair_pool.emplace(pair_groups, config.alpha, config.min_count);

  auto& out = schedule.examples;
  out.reserve(n);
  const std::size_t bs = config.batch_size;
  std::size_t batch = 0;

  auto emit_dae_mono = [&](std::size_t count) {
    while (count > 0) {
      Rng rng = Rng::substream(config.seed, batch++);
      schedule.batch_objectives.push_back(Objective::dae);
      for (std::size_t u = 0; u < bs && count > 0; ++u, --count)
        out.push_back(make_dae_example(mono.items()[mono_pool->draw(rng)], config.deletion_ratio, rng));
    }
  };
  auto emit_mt = [&](std::size_t count) {
    while (count > 0) {
      Rng rng = Rng::substream(config.seed, batch++);
      schedule.batch_objectives.push_back(Objective::mt);
      for (std::size_t u = 0; u < bs && count > 0; ++u, --count)
        out.push_back(make_mt_example(parallel[pair_pool->draw(rng)]));
    }
  };

  switch (config.mode) {
    case SampleMode::dae:
      emit_dae_mono(n);
      break;
    case SampleMode::mt:
      emit_mt(n);
      break;
    case SampleMode::dae_then_mt: {
      const auto first = static_cast<std::size_t>(std::floor(config.phase_split * static_cast<double>(n)));
      emit_dae_mono(first);
      emit_mt(n - first);
      break;
    }
    case SampleMode::dae_plus_mt:
      // A batch draws batch_size pairs; a reconstruction batch corrupts both
      // sides of each pair independently.
      while (out.size() < n) {
        Rng rng = Rng::substream(config.seed, batch++);
        const Objective objective = rng.coin() ? Objective::dae : Objective::mt;
        schedule.batch_objectives.push_back(objective);
        for (std::size_t u = 0; u < bs && out.size() < n; ++u) {
          const ParallelPair& pair = parallel[pair_pool->draw(rng)];
          if (objective == Objective::mt) {
            out.push_back(make_mt_example(pair));
          } else {
            out.push_back(make_dae_example(pair.src, config.deletion_ratio, rng));
            if (out.size() < n) out.push_back(make_dae_example(pair.tgt, config.deletion_ratio, rng));
          }
        }
      }
      break;
  }
  return schedule;
}

}  // namespace newsxlt
