#pragma once

#include <cstdint>
#include <random>

namespace qboot {

// Seed streams for nested Monte Carlo loops. Task index i at level `stream`
// derives seed_for(parent_seed, i, stream) = parent_seed XOR (i * C_stream),
// with a distinct large odd constant per level so that nested XOR offsets
// (replicate r, resample j) cannot collide across levels.
enum class SeedStream : unsigned {
  Replicate = 0,
  Resample = 1,
  Proxy = 2,
  LimitLaw = 3,
  Oracle = 4,
  Grid = 5,
  Stream = 6,
};

std::uint64_t seed_for(std::uint64_t parent_seed, std::uint64_t index, SeedStream stream);

// Deterministic uniform/normal source. mt19937_64 output is fixed by the
// standard, the bit-to-double mapping below is explicit, and normals are
// produced by inverse transform, so any two builds replay identical paths.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on (0,1), never returning an endpoint.
  double uniform01() {
    return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53;
  }

  // Standard normal via the inverse normal cdf.
  double normal();

  // Unbiased uniform draw from {0, ..., n-1} by rejection.
  std::uint64_t uniform_index(std::uint64_t n) {
    const std::uint64_t reject_below = (~n + 1) % n;  // 2^64 mod n
    for (;;) {
      const std::uint64_t x = engine_();
      if (x >= reject_below) return x % n;
    }
  }

  std::uint64_t raw() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace qboot
