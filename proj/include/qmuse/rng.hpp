#pragma once

#include <cstdint>
#include <random>

namespace qmuse {

// Deterministic random source used wherever a measurement is sampled.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// C++ standard, and uniform doubles are derived from the top 53 bits
// directly (std::uniform_real_distribution is not portable across
// standard libraries). Identical seeds therefore give identical streams
// on every platform.
//
// Seed 0 means "derive from entropy"; the resolved seed is retained so
// an entropy-seeded run can still be replayed.
class Rng {
 public:
  static constexpr std::uint64_t kEntropySeed = 0;

  explicit Rng(std::uint64_t seed);

  std::uint64_t next_u64();

  // Uniform in [0, 1) with 53-bit resolution.
  double uniform01();

  // Uniform integer in [0, n), n >= 1. Rejection-sampled, exactly uniform.
  std::uint64_t below(std::uint64_t n);

  // The seed actually in use (resolved from entropy when constructed with 0).
  std::uint64_t seed() const { return seed_; }

 private:
  std::uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace qmuse
