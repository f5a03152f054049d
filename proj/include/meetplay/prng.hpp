#pragma once

#include <cstdint>

namespace meetplay {

/// splitmix64. The output sequence depends only on the seed, so replays match
/// bit for bit across platforms.
class Prng {
 public:
  Prng() = default;
  explicit Prng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next();

  /// next() mod n. The small modulo bias is accepted. Throws
  /// Error("zero-bound") when n == 0.
  std::uint64_t below(std::uint64_t n);

  /// Uniform double in [0,1) built from the top 53 bits of next().
  double unit();

  std::uint64_t state() const { return state_; }

  friend bool operator==(const Prng&, const Prng&) = default;

 private:
  std::uint64_t state_ = 0;
};

}  // namespace meetplay
