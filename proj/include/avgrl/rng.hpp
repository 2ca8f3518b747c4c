#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace avgrl {

/// Seeded pseudo-random stream.  Uniform doubles are built from the top 53
/// bits of each engine output, so streams are bit-identical across standard
/// library implementations.
class Rng {
 public:
  static constexpr std::string_view kAlgorithm =
      "mt19937_64; substream seeds via splitmix64(master, fnv1a64(algo), run, "
      "purpose)";

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Independent stream for one (algorithm, run) pair.  `purpose`
  /// separates the environment's stream from the learner's.
  static Rng substream(std::uint64_t master_seed, std::string_view algo,
                       std::uint64_t run, std::uint64_t purpose);

  std::uint64_t next() { return engine_(); }

  /// Uniform on [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

  /// Standard exponential variate.
  double exponential();

 private:
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t fnv1a64(std::string_view text);

/// Inverse-CDF draw from a probability vector using one uniform `u`.
/// Round-off past the last cumulative sum maps to the last index with
/// positive mass.
int sample_index(std::span<const double> probs, double u);

}  // namespace avgrl
