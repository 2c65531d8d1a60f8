#pragma once

#include <cmath>
#include <cstdint>
#include <string_view>

#include "locest/math_util.hpp"

namespace locest {

/// Deterministic counter-hashed random stream.
///
/// One 64-bit master seed identifies a whole experiment; independent
/// sub-streams are derived by hashing (seed, purpose label, index), so the
/// draws consumed by one work item never depend on scheduling of others.
class RngStream {
 public:
  RngStream() : RngStream(0) {}
  explicit RngStream(uint64_t key) : key_(key), state_(hash_mix(key ^ 0x5bf0'3635'0c5b'13a1ULL)) {}

  static RngStream derive(uint64_t seed, std::string_view label, uint64_t index = 0) {
    uint64_t h = hash_mix(seed);
    for (char ch : label) h = hash_combine(h, static_cast<uint64_t>(static_cast<unsigned char>(ch)));
    h = hash_combine(h, index);
    return RngStream(h);
  }

  /// Sub-stream keyed off this stream's identity, independent of how many
  /// draws have been consumed so far.
  RngStream child(std::string_view label, uint64_t index = 0) const {
    uint64_t h = key_;
    for (char ch : label) h = hash_combine(h, static_cast<uint64_t>(static_cast<unsigned char>(ch)));
    h = hash_combine(h, index);
    return RngStream(h);
  }

  /// Test hook: a stream whose Gaussian draws are exactly zero.
  static RngStream zero_noise() {
    RngStream s(0);
    s.zero_ = true;
    return s;
  }

  bool is_zero_noise() const { return zero_; }
  uint64_t key() const { return key_; }

  uint64_t next_u64() {
    // splitmix64 step
    state_ += 0x9e3779b97f4a7c15ULL;
    uint64_t z = state_;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in the open interval (0, 1).
  double uniform() {
    if (zero_) return 0.5;
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal draw (Box-Muller).
  double normal() {
    if (zero_) return 0.0;
    const double u1 = uniform();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(6.283185307179586477 * u2);
  }

 private:
  uint64_t key_;
  uint64_t state_;
  bool zero_ = false;
};

}  // namespace locest
