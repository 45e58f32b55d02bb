#pragma once

// Counter-based random streams. Every draw is a pure function of
// (seed, stream tag, index), so sensor i always sees the same noise for a
// given seed regardless of how many sensors follow it, and campaign runs can
// execute in any order.

#include <cstdint>
#include <utility>

namespace aoa::rng {

// SplitMix64 finalizer (Steele, Lea & Flood 2014).
constexpr std::uint64_t mix64(std::uint64_t z) {
  z += 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Folds `value` into `state`; order-sensitive.
constexpr std::uint64_t combine(std::uint64_t state, std::uint64_t value) {
  return mix64(state ^ mix64(value));
}

// Stream tags keep independent uses of one seed apart.
enum class Stream : std::uint64_t {
  kAngleNoise = 0x6e6f697365ULL,   // "noise"
  kSensorLayout = 0x6c61796f7574ULL,  // "layout"
};

// Uniform double in [0, 1) built from the top 53 bits.
constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Two independent uniforms for slot `index` of `stream`.
std::pair<double, double> uniform_pair(std::uint64_t seed, Stream stream, std::uint64_t index);

// Two independent standard normals for slot `index` (Box-Muller on the pair
// above). The first feeds azimuth noise, the second elevation noise.
std::pair<double, double> normal_pair(std::uint64_t seed, Stream stream, std::uint64_t index);

// Seed for Monte Carlo run `run` of sample size `n`:
//   combine(combine(combine(0x616f61, base), n), run)
// where 0x616f61 is "aoa" and combine/mix64 are defined above.
std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint64_t n, std::uint64_t run);

}  // namespace aoa::rng
