#pragma once

#include <cstdint>
#include <random>
#include <string_view>
#include <vector>

namespace sfcplace {

// Seedable generator with portable output. Only the raw mt19937_64 stream is
// used; all derived draws (bounded integers, unit doubles) are implemented
// here so results do not depend on the standard library's distributions.
//
// Stream splitting: Rng::stream(seed, label, index) seeds an independent
// generator from splitmix64(seed ^ fnv1a(label) ^ splitmix64(index)).
// Every consumer draws from its own (label, index) substream, so adding or
// removing draws in one substream never shifts another.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(splitmix64(seed)) {}

  static Rng stream(std::uint64_t seed, std::string_view label,
                    std::uint64_t index = 0) {
    return Rng(seed ^ fnv1a(label) ^ splitmix64(index + 0x632be59bd9b4e019ULL));
  }

  // Independent child seed for a named purpose (scenario, partition, ...).
  static std::uint64_t derive(std::uint64_t seed, std::string_view label) {
    return splitmix64(seed ^ fnv1a(label));
  }

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, n). n must be > 0.
  std::uint64_t below(std::uint64_t n) {
    const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
    std::uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % n;
  }

  // Uniform integer in [lo, hi].
  int uniform_int(int lo, int hi) {
    return lo + static_cast<int>(below(static_cast<std::uint64_t>(hi - lo) + 1));
  }

  // Uniform double in [0, 1) with 53 random bits.
  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return uniform01() < p; }

  template <typename T>
  const T& pick(const std::vector<T>& items) {
    return items[below(items.size())];
  }

  static std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }

  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace sfcplace
