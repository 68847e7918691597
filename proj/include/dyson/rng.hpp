#pragma once

#include <cmath>
#include <cstdint>

#include "dyson/numeric.hpp"

namespace dyson {

// PCG XSL-RR 128/64. One generator per (seed, stream_id) pair: distinct
// stream_ids select distinct LCG increments, so streams never share a
// sequence, and the same pair reproduces the same bits on any machine.
class Pcg64 {
 public:
  using u128 = unsigned __int128;

  Pcg64(std::uint64_t seed, std::uint64_t stream_id) {
    inc_ = (static_cast<u128>(stream_id) << 1) | 1u;
    state_ = 0;
    next();
    state_ += (static_cast<u128>(seed) << 64) | seed;
    next();
  }

  std::uint64_t next() {
    const u128 old = state_;
    state_ = old * kMult + inc_;
    const std::uint64_t xored = static_cast<std::uint64_t>(old >> 64) ^ static_cast<std::uint64_t>(old);
    const unsigned rot = static_cast<unsigned>(old >> 122);
    return (xored >> rot) | (xored << ((64u - rot) & 63u));
  }

 private:
  static constexpr u128 kMult = (static_cast<u128>(0x2360ed051fc65da4ULL) << 64) | 0x4385df649fccf645ULL;
  u128 state_;
  u128 inc_;
};

/// One reproducible random stream: uniform and standard-normal draws.
/// Identical (seed, stream_id) always reproduces the identical sequence.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id)
      : seed_(seed), stream_id_(stream_id), gen_(seed, stream_id) {}

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Uniform in the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(gen_.next() >> 11) + 0.5) * 0x1p-53;
  }

  /// Standard normal via Box-Muller; the second sample of each pair is cached.
  double gaussian() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * kPi * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  Pcg64 gen_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace dyson
