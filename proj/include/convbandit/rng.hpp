#pragma once

#include <cstdint>
#include <random>

namespace convbandit {

/// Deterministic random stream. Wraps std::mt19937_64 (whose output sequence
/// is fully pinned by the standard) and derives uniforms with a fixed 53-bit
/// recipe so that identical seeds give identical draws on every platform.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  std::uint64_t next_u64() { return gen_(); }

  /// Uniform double in [0, 1).
  double next_unit() {
    return static_cast<double>(gen_() >> 11) * 0x1.0p-53;
  }

  bool bernoulli(double p) { return next_unit() < p; }

 private:
  std::mt19937_64 gen_;
};

namespace detail {
// splitmix64 finalizer; bijective on 64-bit words.
inline std::uint64_t mix64(std::uint64_t x) {
  x ^= x >> 30;
  x *= 0xBF58476D1CE4E5B9ULL;
  x ^= x >> 27;
  x *= 0x94D049BB133111EBULL;
  x ^= x >> 31;
  return x;
}
}  // namespace detail

/// Child-seed derivation for replicated experiments.
///
/// The rule is fixed (and pinned by tests): the master seed is offset by two
/// odd 64-bit constants scaled by the 0-based policy and run indices, then
/// passed through the splitmix64 finalizer. Streams for distinct
/// (policy, run) pairs are independent for all practical purposes.
inline std::uint64_t child_seed(std::uint64_t master_seed,
                                std::uint64_t policy_index,
                                std::uint64_t run_index) {
  constexpr std::uint64_t kPolicyStride = 0x9E3779B97F4A7C15ULL;
  constexpr std::uint64_t kRunStride = 0xC2B2AE3D27D4EB4FULL;
  return detail::mix64(master_seed + kPolicyStride * (policy_index + 1) +
                       kRunStride * (run_index + 1));
}

}  // namespace convbandit
