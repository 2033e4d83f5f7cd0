#pragma once

#include <cstdint>
#include <random>

#include "mostowkit/types.hpp"

namespace mostowkit {

// Reproducible generator: mt19937_64 for raw bits, 53-bit uniforms and a
// Box-Muller transform for normals. Independent streams are seeded by
// SplitMix64 over (seed, index). Output is identical across platforms.
std::uint64_t splitmix64(std::uint64_t x);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}
  static Rng stream(std::uint64_t seed, std::uint64_t index) {
    return Rng(derive_seed(seed, index));
  }

  double uniform();  // [0, 1)
  double normal();
  cplx complex_normal();  // E|z|^2 = 1

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace mostowkit
