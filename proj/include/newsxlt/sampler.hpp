#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "newsxlt/error.hpp"
#include "newsxlt/rng.hpp"
#include "newsxlt/types.hpp"

namespace newsxlt {

enum class SampleMode { dae, mt, dae_plus_mt, dae_then_mt };

const char* to_string(SampleMode m) noexcept;
SampleMode parse_sample_mode(const std::string& s);

struct SamplerConfig {
  double alpha = 0.3;
  std::size_t min_count = 100;
  double deletion_ratio = 0.6;
  std::uint64_t seed = 0;
  std::size_t n_examples = 0;
  SampleMode mode = SampleMode::dae;
  double phase_split = 0.5;
  std::size_t batch_size = 1;

  void validate() const;
};

/// Smoothed categorical distribution p(L) ∝ |L|^alpha over keys of type K.
template <typename K>
struct LanguageDistribution {
  std::vector<K> keys;
  std::vector<double> probabilities;
  std::vector<std::size_t> counts;

  double probability(const K& key) const {
    for (std::size_t i = 0; i < keys.size(); ++i)
      if (keys[i] == key) return probabilities[i];
    return 0.0;
  }

  /// Inverse-CDF draw.
  std::size_t draw(Rng& rng) const {
    const double u = rng.uniform01();
    double acc = 0.0;
    for (std::size_t i = 0; i + 1 < probabilities.size(); ++i) {
      acc += probabilities[i];
      if (u < acc) return i;
    }
    return probabilities.size() - 1;
  }
};

/// Drops keys with fewer than min_count texts and smooths the rest.
/// Throws Error("no eligible languages") when nothing survives.
template <typename K>
LanguageDistribution<K> language_weights(const std::map<K, std::size_t>& counts, double alpha,
                                         std::size_t min_count) {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw Error("alpha must be in (0, 1]");
  LanguageDistribution<K> dist;
  double total = 0.0;
  for (const auto& [key, count] : counts) {
    if (count < min_count || count == 0) continue;
    dist.keys.push_back(key);
    dist.counts.push_back(count);
    const double w = std::pow(static_cast<double>(count), alpha);
    dist.probabilities.push_back(w);
    total += w;
  }
  if (dist.keys.empty()) throw Error("no eligible languages");
  for (auto& p : dist.probabilities) p /= total;
  return dist;
}

/// n draws with replacement: key from `dist`, then a text uniformly within it.
std::vector<NewsText> sample_texts(const Corpus& corpus, const LanguageDistribution<LanguageKey>& dist,
                                   std::size_t n, std::uint64_t seed);

/// Deletes min(floor(ratio*l), l-1) uniformly chosen positions; the
/// survivors keep their order. Throws Error on empty input.
std::vector<std::string> corrupt_delete(const std::vector<std::string>& tokens, double ratio, Rng& rng);

Seq2SeqExample make_dae_example(const NewsText& text, double ratio, Rng& rng);

enum class Direction { src_to_tgt, tgt_to_src };

/// The source-side sentence is the "corruption" of the target-side one.
Seq2SeqExample make_mt_example(const ParallelPair& pair, Direction direction = Direction::src_to_tgt);

struct Schedule {
  std::vector<Seq2SeqExample> examples;
  std::vector<Objective> batch_objectives;  // one per batch
};

/// Generates exactly config.n_examples examples for the configured mode.
Schedule schedule_examples(const Corpus& mono, const std::vector<ParallelPair>& parallel,
                           const SamplerConfig& config);

}  // namespace newsxlt
