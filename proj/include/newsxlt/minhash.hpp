#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace newsxlt {

/// Per-permutation minima; length equals the permutation count.
using MinHashSignature = std::vector<std::uint64_t>;

enum class ShingleUnit { word, character };

struct MinHashParams {
  std::size_t permutations = 256;
  std::size_t shingle_n = 5;
  ShingleUnit unit = ShingleUnit::word;
  std::uint64_t seed = 0;
};

/// Shingle set of a normalized text: n-grams over whitespace tokens (or
/// scalar values) of the lowercased text. Shorter inputs form one shingle.
/// Duplicates are removed; order is unspecified.
std::vector<std::string> shingles(std::string_view text, std::size_t n, ShingleUnit unit = ShingleUnit::word);

/// 64-bit hash of a shingle.
std::uint64_t shingle_hash(std::string_view shingle) noexcept;

/// Family of universal hashes h -> (a*h + b) mod (2^61 - 1) with (a, b)
/// drawn deterministically from a seed.
class MinHasher {
 public:
  static constexpr std::uint64_t kPrime = (std::uint64_t{1} << 61) - 1;

  explicit MinHasher(const MinHashParams& params);

  const MinHashParams& params() const noexcept { return params_; }
  std::size_t permutations() const noexcept { return a_.size(); }

  /// Throws Error for empty text.
  MinHashSignature signature(std::string_view text) const;
  MinHashSignature signature_of_hashes(const std::vector<std::uint64_t>& hashes) const;

 private:
  MinHashParams params_;
  std::vector<std::uint64_t> a_;
  std::vector<std::uint64_t> b_;
};

/// Fraction of matching positions. Signatures must have equal length.
double estimated_jaccard(const MinHashSignature& a, const MinHashSignature& b);

}  // namespace newsxlt
