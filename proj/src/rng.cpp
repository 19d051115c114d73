#include "statusarena/rng.hpp"

#include <array>

namespace statusarena {

namespace {

std::uint64_t mix(std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  std::array<std::uint32_t, 2> out{};
  seq.generate(out.begin(), out.end());
  return (static_cast<std::uint64_t>(out[0]) << 32) | out[1];
}

}  // namespace

SeedStream SeedStream::derive(std::uint64_t run_seed, std::uint64_t domain, std::uint64_t index) {
  return SeedStream(mix(mix(run_seed, domain), index));
}

std::uint64_t SeedStream::next() { return mix(key_, counter_++); }

double unit_uniform(std::uint64_t seed) {
  std::mt19937_64 engine(seed);
  return std::uniform_real_distribution<double>(0.0, 1.0)(engine);
}

}  // namespace statusarena
