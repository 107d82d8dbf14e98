#pragma once

#include <cstdint>
#include <string_view>

namespace stroobnet {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr std::uint64_t hash_tag(std::string_view tag) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (char c : tag) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Counter-based generator: draw i of stream (seed, tag) is a pure function of
/// (seed, tag, i). Independent streams are split off by tag, so the order in
/// which modules consume randomness does not affect each other's draws.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::string_view tag)
      : key_(splitmix64(seed ^ splitmix64(hash_tag(tag)))) {}

  CounterRng split(std::string_view tag) const {
    CounterRng child(*this);
    child.key_ = splitmix64(key_ ^ splitmix64(hash_tag(tag)));
    child.counter_ = 0;
    return child;
  }

  std::uint64_t next_u64() { return splitmix64(key_ + 0x632be59bd9b4e019ULL * ++counter_); }

  /// Uniform in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound); bound must be > 0.
  std::uint64_t below(std::uint64_t bound) {
    // Lemire-style rejection keeps the result unbiased.
    const std::uint64_t threshold = (0 - bound) % bound;
    for (;;) {
      const std::uint64_t r = next_u64();
      if (r >= threshold) return r % bound;
    }
  }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace stroobnet
