#pragma once

#include <cstdint>
#include <random>

namespace statusarena {

/// Counter-based seed stream. Each draw derives a fresh 64-bit seed from
/// (key, counter) through std::seed_seq, so the whole stream state is two
/// integers and survives snapshot/rehydrate exactly.
class SeedStream {
 public:
  SeedStream() = default;
  SeedStream(std::uint64_t key, std::uint64_t counter = 0) : key_(key), counter_(counter) {}

  /// Stream for a sub-entity (agent, seller, ...) of a run.
  static SeedStream derive(std::uint64_t run_seed, std::uint64_t domain, std::uint64_t index);

  std::uint64_t next();
  std::mt19937_64 engine() { return std::mt19937_64(next()); }

  std::uint64_t key() const { return key_; }
  std::uint64_t counter() const { return counter_; }

 private:
  std::uint64_t key_ = 0;
  std::uint64_t counter_ = 0;
};

/// Uniform double in [0, 1) from a single seed.
double unit_uniform(std::uint64_t seed);

}  // namespace statusarena
