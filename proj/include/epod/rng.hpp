// Copyright (c) the epod developers. All rights reserved.
// SPDX-License-Identifier: Apache-2.0

#ifndef EPOD_RNG_HPP
#define EPOD_RNG_HPP

#include <cstdint>

namespace epod {

// Counter-based generator built on the splitmix64 finalizer.
//
// A stream is identified by (seed, stream_index); draw k of a stream is
//   mix(mix(seed + GOLDEN * (stream_index + 1)) + GOLDEN * (k + 1))
// where mix is the splitmix64 output function and GOLDEN is 2^64 / phi.
// Every draw is a pure function of (seed, stream, counter), so independent
// streams can be evaluated in any order (one stream per snapshot index)
// and results are bitwise reproducible across runs and thread counts.
class CounterRng {
 public:
  CounterRng(std::uint64_t seed, std::uint64_t stream_index)
      : key_(mix(seed + kGolden * (stream_index + 1))), counter_(0) {}

  std::uint64_t next_u64() { return mix(key_ + kGolden * (++counter_)); }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform in [lo, hi).
  double next_uniform(double lo, double hi) { return lo + (hi - lo) * next_double(); }

  // Uniform integer in [0, bound); bound > 0. Uses rejection to avoid
  // modulo bias.
  std::uint64_t next_below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t v;
    do {
      v = next_u64();
    } while (v >= limit);
    return v % bound;
  }

 private:
  static constexpr std::uint64_t kGolden = 0x9E3779B97F4A7C15ULL;

  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  std::uint64_t key_;
  std::uint64_t counter_;
};

}  // namespace epod

#endif  // EPOD_RNG_HPP
