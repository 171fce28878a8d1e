#pragma once

#include <cstdint>
#include <limits>

namespace tailreg::rng {

inline constexpr std::uint64_t splitmix64(std::uint64_t& state) noexcept {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  return splitmix64(x);
}

/// xoshiro256++ generator. Streams are never advanced from a shared sequence;
/// each one is keyed on (seed, replication, lane) through `derive`, so the
/// numbers a replication sees do not depend on which worker runs it.
class Stream {
 public:
  using result_type = std::uint64_t;

  explicit Stream(std::uint64_t key = 0) noexcept {
    for (auto& word : s_) word = splitmix64(key);
  }

  /// Lanes 0..K-1 are the arms' reward streams; lane K and above belong to
  /// the policy (Thompson sampling draws).
  static Stream derive(std::uint64_t seed, std::uint64_t replication,
                       std::uint64_t lane) noexcept {
    std::uint64_t key = mix64(seed);
    key = mix64(key ^ mix64(replication + 0x632be59bd9b4e019ULL));
    key = mix64(key ^ mix64(lane + 0x8cb92ba72f3d8dd7ULL));
    return Stream(key);
  }

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept {
    const std::uint64_t result = rotl(s_[0] + s_[3], 23) + s_[0];
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t s_[4];
};

}  // namespace tailreg::rng
