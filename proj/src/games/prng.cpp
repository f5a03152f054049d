#include "meetplay/prng.hpp"

#include "meetplay/error.hpp"

namespace meetplay {

std::uint64_t Prng::next() {
  state_ += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state_;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::uint64_t Prng::below(std::uint64_t n) {
  if (n == 0) throw Error("zero-bound", "prng bound must be positive");
  return next() % n;
}

double Prng::unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

}  // namespace meetplay
