#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace bayesic {

// SplitMix64 finalizer: a bijective 64-bit mixer.
std::uint64_t mix64(std::uint64_t x);

/// Seed for one experiment cell, derived by folding each index of `path` into
/// the base seed. Distinct paths give statistically independent streams, and
/// the result does not depend on the order cells are executed in.
std::uint64_t derive_seed(std::uint64_t base, std::initializer_list<std::uint64_t> path);

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform on the open interval (0, 1); zero is redrawn.
  double uniform_open();
  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace bayesic
