#include "qmuse/rng.hpp"

#include <stdexcept>

namespace qmuse {

namespace {

std::uint64_t resolve_seed(std::uint64_t seed) {
  if (seed != Rng::kEntropySeed) {
    return seed;
  }
  std::random_device dev;
  std::uint64_t s = (static_cast<std::uint64_t>(dev()) << 32) ^ dev();
  if (s == Rng::kEntropySeed) {
    s = 0x9e3779b97f4a7c15ULL;
  }
  return s;
}

}  // namespace

Rng::Rng(std::uint64_t seed) : seed_(resolve_seed(seed)), engine_(seed_) {}

std::uint64_t Rng::next_u64() { return engine_(); }

double Rng::uniform01() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

std::uint64_t Rng::below(std::uint64_t n) {
  if (n == 0) {
    throw std::invalid_argument("Rng::below: n must be >= 1");
  }
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % n;
  std::uint64_t x;
  do {
    x = engine_();
  } while (x >= limit);
  return x % n;
}

}  // namespace qmuse
