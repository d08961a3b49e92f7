#pragma once

#include <cstdint>
#include <random>

#include "flowdirect/point.hpp"

namespace flowdirect {

// SplitMix64 finalizer; used to derive well-separated child seeds.
std::uint64_t mix_seed(std::uint64_t h, std::uint64_t salt);

// Deterministic random stream. The engine is mt19937_64 (output fully fixed by
// the standard) and all variate transforms are implemented here, so sequences
// are reproducible across platforms and library versions.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : gen_(seed) {}

  static RngStream derive(std::uint64_t root, std::uint64_t s1);
  static RngStream derive(std::uint64_t root, std::uint64_t s1, std::uint64_t s2);
  static RngStream derive(std::uint64_t root, std::uint64_t s1, std::uint64_t s2, std::uint64_t s3);

  std::uint64_t next_u64() { return gen_(); }

  // Uniform on [0, 1) with 53 random bits.
  double uniform();

  // Standard normal via Box-Muller; two uniforms per draw, no cached state.
  double normal();

  Point normal_point(std::size_t dim);

  // Index draw from explicit probabilities (must sum to ~1).
  std::size_t categorical(const std::vector<double>& probabilities);

 private:
  std::mt19937_64 gen_;
};

}  // namespace flowdirect
