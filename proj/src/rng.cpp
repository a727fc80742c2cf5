#include "topofuse/rng.hpp"

#include <cmath>
#include <numbers>

namespace topofuse {

std::uint64_t CounterRng::below(std::uint64_t bound) {
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % bound);
  std::uint64_t x = next_u64();
  while (x >= limit) x = next_u64();
  return x % bound;
}

double CounterRng::normal() {
  double u1 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  const double u2 = uniform();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

CounterRng CounterRng::split(std::uint64_t stream) const {
  return CounterRng(RawKey{}, mix64(key_ ^ mix64(stream + kGolden)));
}

}  // namespace topofuse
