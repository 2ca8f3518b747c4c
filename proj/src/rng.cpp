#include "avgrl/rng.hpp"

#include <cmath>
#include <limits>

#include "avgrl/mdp.hpp"

namespace avgrl {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view text) {
  std::uint64_t hash = 0xCBF29CE484222325ull;
  for (unsigned char c : text) {
    hash ^= c;
    hash *= 0x100000001B3ull;
  }
  return hash;
}

Rng Rng::substream(std::uint64_t master_seed, std::string_view algo,
                   std::uint64_t run, std::uint64_t purpose) {
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ fnv1a64(algo));
  h = splitmix64(h ^ run);
  h = splitmix64(h ^ purpose);
  return Rng(h);
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) throw Error("below(n) needs n >= 1");
  // Rejection sampling keeps the draw unbiased.
  const std::uint64_t limit =
      std::numeric_limits<std::uint64_t>::max() -
      std::numeric_limits<std::uint64_t>::max() % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

double Rng::exponential() { return -std::log1p(-uniform()); }

int sample_index(std::span<const double> probs, double u) {
  double cumulative = 0.0;
  int last_positive = 0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    if (probs[i] <= 0.0) continue;
    last_positive = static_cast<int>(i);
    cumulative += probs[i];
    if (u < cumulative) return last_positive;
  }
  return last_positive;
}

}  // namespace avgrl
