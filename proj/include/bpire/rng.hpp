#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace bpire {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Hierarchical stream identifier. A key is derived from a master seed and a
/// path of child ids; distinct paths give statistically independent streams.
class StreamKey {
 public:
  constexpr StreamKey() = default;
  static constexpr StreamKey root(std::uint64_t master_seed) noexcept {
    return StreamKey(splitmix64(master_seed ^ 0x6A09E667F3BCC909ULL), master_seed);
  }
  constexpr StreamKey child(std::uint64_t id) const noexcept {
    return StreamKey(splitmix64(value_ ^ splitmix64(id + 0x3C6EF372FE94F82BULL)), seed_);
  }
  constexpr std::uint64_t value() const noexcept { return value_; }
  /// The master seed this key descends from.
  constexpr std::uint64_t master_seed() const noexcept { return seed_; }

 private:
  constexpr StreamKey(std::uint64_t v, std::uint64_t s) : value_(v), seed_(s) {}
  std::uint64_t value_ = 0;
  std::uint64_t seed_ = 0;
};

/// xoshiro256++ engine; satisfies UniformRandomBitGenerator. Single owner:
/// never share one stream between workers.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(StreamKey key) noexcept { seed(key.value()); }
  RngStream(std::uint64_t master_seed, std::uint64_t stream_id) noexcept
      : RngStream(StreamKey::root(master_seed).child(stream_id)) {}

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

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform01() noexcept {
    return static_cast<double>((*this)() >> 11) * 0x1.0p-53;
  }

 private:
  static constexpr std::uint64_t rotl(std::uint64_t x, int k) noexcept {
    return (x << k) | (x >> (64 - k));
  }
  void seed(std::uint64_t v) noexcept {
    for (auto& s : s_) {
      v = splitmix64(v);
      s = v;
    }
  }

  std::array<std::uint64_t, 4> s_{};
};

}  // namespace bpire
