#include "aoa/rng.hpp"

#include <cmath>
#include <numbers>

namespace aoa::rng {

std::pair<double, double> uniform_pair(std::uint64_t seed, Stream stream, std::uint64_t index) {
  const std::uint64_t key = combine(combine(seed, static_cast<std::uint64_t>(stream)), index);
  return {to_unit(mix64(key)), to_unit(mix64(key + 1))};
}

std::pair<double, double> normal_pair(std::uint64_t seed, Stream stream, std::uint64_t index) {
  auto [u1, u2] = uniform_pair(seed, stream, index);
  // u1 in (0, 1] keeps the log finite.
  const double radius = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  return {radius * std::cos(angle), radius * std::sin(angle)};
}

std::uint64_t derive_run_seed(std::uint64_t base_seed, std::uint64_t n, std::uint64_t run) {
  return combine(combine(combine(0x616f61ULL, base_seed), n), run);
}

}  // namespace aoa::rng
