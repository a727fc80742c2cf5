// Seedable, splittable counter-based random generator.
//
// Every draw is a pure function of (key, counter): the n-th output of a
// stream keyed by k is mix64(k + (n + 1) * kGolden), where mix64 is the
// SplitMix64 finalizer. split(s) derives an independent child key from the
// parent key and a stream label, so reproducing a mask or shuffle only
// requires the seed and the labels used to reach it.
#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace topofuse {

inline constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed) : key_(mix64(seed ^ 0x5eed5eed5eed5eedULL)) {}

  std::uint64_t next_u64() { return mix64(key_ + (++counter_) * kGolden); }

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  /// Uniform integer in [0, bound) by rejection; bound must be > 0.
  std::uint64_t below(std::uint64_t bound);

  /// Standard normal via Box-Muller (one draw consumes two counters).
  double normal();

  bool bernoulli(double p) { return uniform() < p; }

  /// Independent child stream labelled by `stream`; the parent is unchanged.
  CounterRng split(std::uint64_t stream) const;

  template <typename T>
  void shuffle(std::span<T> items) {
    for (std::size_t i = items.size(); i > 1; --i) {
      const auto j = static_cast<std::size_t>(below(i));
      std::swap(items[i - 1], items[j]);
    }
  }

  std::uint64_t counter() const { return counter_; }

 private:
  struct RawKey {};
  CounterRng(RawKey, std::uint64_t key) : key_(key) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace topofuse
