#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

namespace ebr {

namespace detail {

// SplitMix64 finalizer (Steele, Lea, Flood 2014).  Bijective on uint64.
inline std::uint64_t mix64(std::uint64_t z) {
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ull;
inline constexpr std::uint64_t kStreamSalt = 0xD1B54A32D192ED03ull;

}  // namespace detail

/// Counter-based pseudo-random stream.  Draw i of stream (seed, id) is
/// mix64(key + (i+1)*golden) with key = mix64(mix64(seed + golden) ^
/// mix64(id + salt)); the sequence is a pure function of (seed, id, i), so
/// it is identical across platforms and independent of evaluation order.
/// Substreams derive fresh ids, which is what makes parallel ensembles
/// schedule-independent.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed),
        stream_id_(stream_id),
        key_(detail::mix64(detail::mix64(seed + detail::kGolden) ^
                           detail::mix64(stream_id + detail::kStreamSalt))) {}

  static constexpr std::string_view algorithm() { return "splitmix64-ctr/1"; }

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }
  std::uint64_t draws() const { return counter_; }

  std::uint64_t next_u64() {
    ++counter_;
    return detail::mix64(key_ + counter_ * detail::kGolden);
  }

  /// Uniform on [0, 1), 53-bit resolution.
  double next_double() { return double(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on (0, 1].
  double next_double_open_low() { return 1.0 - next_double(); }

  /// Exponential(1) via inversion.
  double next_exponential() { return -std::log(next_double_open_low()); }

  /// Standard normal via Box-Muller (uses two draws).
  double next_normal() {
    const double u = next_double_open_low();
    const double v = next_double();
    return std::sqrt(-2.0 * std::log(u)) *
           std::cos(6.283185307179586476925286766559 * v);
  }

  /// Independent child stream; children with distinct indices never share
  /// a key with each other or with the parent.
  RngStream substream(std::uint64_t child_index) const {
    return RngStream(seed_, detail::mix64(stream_id_ + detail::kStreamSalt) +
                                (child_index + 1) * detail::kGolden);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

}  // namespace ebr
