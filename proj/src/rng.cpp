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

#include "kpzlab/rng.hpp"

#include <cmath>

namespace kpzlab {

namespace {

constexpr int kLayers = 128;
constexpr double kTailStart = 3.442619855899;
constexpr double kLayerArea = 9.91256303526217e-3;

std::array<double, kLayers + 1> ziggurat_edges() {
  std::array<double, kLayers + 1> x{};
  double f = std::exp(-0.5 * kTailStart * kTailStart);
  x[0] = kLayerArea / f;
  x[1] = kTailStart;
  x[kLayers] = 0.0;
  for (int i = 2; i < kLayers; ++i) {
    x[i] = std::sqrt(-2.0 * std::log(kLayerArea / x[i - 1] + f));
    f = std::exp(-0.5 * x[i] * x[i]);
  }
  return x;
}

std::array<double, kLayers> ziggurat_ratios(const std::array<double, kLayers + 1>& x) {
  std::array<double, kLayers> r{};
  for (int i = 0; i < kLayers; ++i) r[i] = x[i + 1] / x[i];
  return r;
}

}  // namespace

const std::array<double, 129> Rng::kZigX = ziggurat_edges();
const std::array<double, 128> Rng::kZigRatio = ziggurat_ratios(Rng::kZigX);

std::uint64_t Rng::splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

Rng::Rng(std::uint64_t seed, std::uint64_t stream, std::uint64_t substream)
    : seed_(seed), stream_(stream), substream_(substream) {
  std::uint64_t key = splitmix64(seed);
  key = splitmix64(key ^ stream);
  key = splitmix64(key ^ (substream * 0xD1B54A32D192ED03ull));
  for (auto& w : s_) {
    key += 0x9E3779B97F4A7C15ull;
    w = splitmix64(key);
  }
}

double Rng::normal_slow(double u, std::size_t layer) {
  for (;;) {
    if (layer == 0) {
      double tx, ty;
      do {
        tx = -std::log(uniform()) / kTailStart;
        ty = -std::log(uniform());
      } while (ty + ty < tx * tx);
      return u < 0.0 ? -(kTailStart + tx) : kTailStart + tx;
    }
    const double xx = u * kZigX[layer];
    const double f0 = std::exp(-0.5 * (kZigX[layer] * kZigX[layer] - xx * xx));
    const double f1 =
        std::exp(-0.5 * (kZigX[layer + 1] * kZigX[layer + 1] - xx * xx));
    if (f1 + uniform() * (f0 - f1) < 1.0) return xx;

    const std::uint64_t bits = next_u64();
    layer = static_cast<std::size_t>(bits & 127u);
    u = (static_cast<double>(bits >> 11) + 0.5) * 0x1.0p-52 - 1.0;
    if (std::abs(u) < kZigRatio[layer]) return u * kZigX[layer];
  }
}

}  // namespace kpzlab
