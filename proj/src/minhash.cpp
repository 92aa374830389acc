#include "newsxlt/minhash.hpp"

#include <algorithm>
#include <limits>

#include "newsxlt/error.hpp"
#include "newsxlt/rng.hpp"
#include "newsxlt/text.hpp"

namespace newsxlt {
namespace {

constexpr std::uint64_t kP = MinHasher::kPrime;

inline std::uint64_t mod_mersenne(unsigned __int128 x) noexcept {
  std::uint64_t r = static_cast<std::uint64_t>(x & kP) + static_cast<std::uint64_t>(x >> 61);
  r = (r & kP) + (r >> 61);
  return r >= kP ? r - kP : r;
}

std::uint64_t draw_below_prime(Rng& rng) {
  std::uint64_t x;
  do {
    x = rng.next() >> 3;
  } while (x >= kP);
  return x;
}

}  // namespace

std::vector<std::string> shingles(std::string_view text, std::size_t n, ShingleUnit unit) {
  if (n == 0) throw Error("shingle size must be positive");
  const std::string lowered = to_lower(text);
  std::vector<std::string> units;
  if (unit == ShingleUnit::word) {
    units = split_whitespace(lowered);
  } else {
    const std::size_t len = lowered.size();
    std::size_t i = 0;
    while (i < len) {
      std::size_t j = i + 1;
      while (j < len && (static_cast<unsigned char>(lowered[j]) & 0xC0) == 0x80) ++j;
      units.push_back(lowered.substr(i, j - i));
      i = j;
    }
  }
  std::vector<std::string> out;
  if (units.empty()) return out;
  const std::string_view sep = unit == ShingleUnit::word ? " " : "";
  if (units.size() <= n) {
    out.push_back(join(units, sep));
    return out;
  }
  out.reserve(units.size() - n + 1);
  for (std::size_t i = 0; i + n <= units.size(); ++i) {
    std::string s = units[i];
    for (std::size_t k = 1; k < n; ++k) {
      s.append(sep);
      s.append(units[i + k]);
    }
    out.push_back(std::move(s));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::uint64_t shingle_hash(std::string_view shingle) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : shingle) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return splitmix64(h);
}

MinHasher::MinHasher(const MinHashParams& params) : params_(params) {
  if (params.permutations == 0) throw Error("minhash needs at least one permutation");
  Rng rng(params.seed);
  a_.resize(params.permutations);
  b_.resize(params.permutations);
  for (std::size_t i = 0; i < params.permutations; ++i) {
    do {
      a_[i] = draw_below_prime(rng);
    } while (a_[i] == 0);
    b_[i] = draw_below_prime(rng);
  }
}

MinHashSignature MinHasher::signature_of_hashes(const std::vector<std::uint64_t>& hashes) const {
  if (hashes.empty()) throw Error("cannot compute a minhash signature of an empty shingle set");
  MinHashSignature sig(a_.size(), std::numeric_limits<std::uint64_t>::max());
  for (std::uint64_t raw : hashes) {
    const std::uint64_t h = mod_mersenne(raw);
    for (std::size_t i = 0; i < a_.size(); ++i) {
      const std::uint64_t v = mod_mersenne(static_cast<unsigned __int128>(a_[i]) * h + b_[i]);
      if (v < sig[i]) sig[i] = v;
    }
  }
  return sig;
}

MinHashSignature MinHasher::signature(std::string_view text) const {
  const auto set = shingles(text, params_.shingle_n, params_.unit);
  if (set.empty()) throw Error("cannot shingle empty text");
  std::vector<std::uint64_t> hashes;
  hashes.reserve(set.size());
  for (const auto& s : set) hashes.push_back(shingle_hash(s));
  return signature_of_hashes(hashes);
}

double estimated_jaccard(const MinHashSignature& a, const MinHashSignature& b) {
  if (a.size() != b.size() || a.empty()) throw Error("signature length mismatch");
  std::size_t same = 0;
  for (std::size_t i = 0; i < a.size(); ++i) same += a[i] == b[i];
  return static_cast<double>(same) / static_cast<double>(a.size());
}

}  // namespace newsxlt
