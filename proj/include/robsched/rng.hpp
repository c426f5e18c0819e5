#pragma once

#include <cstdint>
#include <limits>

namespace robsched {

// SplitMix64 (Steele, Lea & Flood). Seeding is O(1), which matters because the
// simulator opens one stream per (replication, job) pair.
class SplitMix64 {
 public:
  using result_type = std::uint64_t;

  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

 private:
  std::uint64_t state_;
};

/// Substream splitting rule: the child seed of `parent` under key `k` is the
/// first SplitMix64 output of the state `parent ^ (golden * (k + 1))`.
/// Distinct keys give statistically independent child streams.
constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t key) {
  std::uint64_t z = parent ^ (0x9E3779B97F4A7C15ULL * (key + 1));
  z += 0x9E3779B97F4A7C15ULL;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

constexpr std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t k1, std::uint64_t k2) {
  return derive_seed(derive_seed(parent, k1), k2);
}

}  // namespace robsched
