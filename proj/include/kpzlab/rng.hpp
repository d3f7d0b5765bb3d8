/*
   Copyright 2026 The kpzlab Authors

   Licensed under the Apache License, Version 2.0 (the "License");
   you may not use this file except in compliance with the License.
   You may obtain a copy of the License at

       http://www.apache.org/licenses/LICENSE-2.0

   Unless required by applicable law or agreed to in writing, software
   distributed under the License is distributed on an "AS IS" BASIS,
   WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
   See the License for the specific language governing permissions and
   limitations under the License.
*/

#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>

namespace kpzlab {

/// Reproducible random stream addressed by (seed, stream, substream).
///
/// The xoshiro256++ state is derived from the address by SplitMix64 hashing,
/// so stream k of a run can be constructed directly without advancing any
/// other stream. Replica r of an experiment uses stream r; independent pieces
/// inside one replica use distinct substreams via split().
class Rng {
 public:
  Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream = 0);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream() const { return stream_; }
  std::uint64_t substream() const { return substream_; }

  /// Child generator for `tag`. Splits nest: the child substream hashes the
  /// parent substream with the tag.
  Rng split(std::uint64_t tag) const {
    return Rng(seed_, stream_, splitmix64(substream_ ^ splitmix64(tag + 1)));
  }

  std::uint64_t next_u64() {
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

  /// Uniform double in the open interval (0, 1).
  double uniform() {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  /// Standard normal deviate (128-layer ziggurat).
  double normal() {
    const std::uint64_t bits = next_u64();
    const auto layer = static_cast<std::size_t>(bits & 127u);
    // top 53 bits -> u uniform in (-1, 1)
    const double u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-52 - 1.0;
    if (std::abs(u) < kZigRatio[layer]) return u * kZigX[layer];
    return normal_slow(u, layer);
  }

  static std::uint64_t splitmix64(std::uint64_t x);

 private:
  double normal_slow(double u, std::size_t layer);

  static const std::array<double, 129> kZigX;
  static const std::array<double, 128> kZigRatio;

  static std::uint64_t rotl(std::uint64_t x, int k) {
    return (x << k) | (x >> (64 - k));
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t substream_;
  std::array<std::uint64_t, 4> s_{};
};

}  // namespace kpzlab
