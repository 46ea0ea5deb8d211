#pragma once

#include <cmath>
#include <cstdint>

namespace dualmix {

// Counter-based pseudo-random generator built on the SplitMix64 finalizer.
// Output depends only on (seed, stream, draw index), so independent streams
// can be handed to worker threads and replayed bit-identically on any
// platform. Period and quality are more than adequate for Monte Carlo use.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream)
      : base_(mix(mix(seed) ^ (0x9E3779B97F4A7C15ULL * (stream + 1)))) {}

  std::uint64_t next_u64() {
    counter_ += 0x9E3779B97F4A7C15ULL;
    return mix(base_ + counter_);
  }

  // Uniform on the open interval (0, 1); never returns an endpoint, which
  // keeps inverse-CDF transforms away from log(0).
  double next_unit() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via Box-Muller; two uniforms per draw, no cached state.
  double next_normal() {
    const double u1 = next_unit();
    const double u2 = next_unit();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586476925287 * u2);
  }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z ^= z >> 30;
    z *= 0xBF58476D1CE4E5B9ULL;
    z ^= z >> 27;
    z *= 0x94D049BB133111EBULL;
    z ^= z >> 31;
    return z;
  }

  std::uint64_t base_;
  std::uint64_t counter_ = 0;
};

}  // namespace dualmix
