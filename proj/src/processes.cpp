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

#include "kpzlab/processes.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace kpzlab {

namespace {

constexpr double kGridTol = 1e-9;

void check_grid(double dt, std::size_t n) {
  if (!(dt > 0.0) || !std::isfinite(dt)) {
    throw std::invalid_argument("grid step must be positive, got " +
                                std::to_string(dt));
  }
  if (n == 0) throw std::invalid_argument("sample count must be at least 1");
}

// Where the anchor time 0 falls on the grid t0 + k*dt.
struct Anchor {
  enum class Kind { kInside, kBefore, kAfter } kind;
  std::size_t index = 0;  // valid for kInside
};

Anchor locate_anchor(double t0, double dt, std::size_t n) {
  const double t_last = t0 + static_cast<double>(n - 1) * dt;
  if (t0 >= 0.0) return {Anchor::Kind::kBefore, 0};
  if (t_last <= 0.0) return {Anchor::Kind::kAfter, n - 1};
  const double k = -t0 / dt;
  const double kr = std::round(k);
  if (std::abs(k - kr) > kGridTol * std::max(1.0, k)) {
    throw std::invalid_argument(
        "grid straddles time 0 without containing it as a grid point");
  }
  return {Anchor::Kind::kInside, static_cast<std::size_t>(kr)};
}

// Fills `out` with one coordinate of a drifted Brownian motion with
// B(0) = 0 sampled at the grid times.
void fill_brownian(Rng& rng, double t0, double dt, double drift, double sd_step,
                   double diffusion, std::vector<double>& out) {
  const std::size_t n = out.size();
  const Anchor a = locate_anchor(t0, dt, n);
  switch (a.kind) {
    case Anchor::Kind::kBefore: {
      // first value at t0 >= 0 is B(t0)
      double v = drift * t0 + std::sqrt(diffusion * t0) * rng.normal();
      out[0] = v;
      for (std::size_t k = 1; k < n; ++k) {
        v += drift * dt + sd_step * rng.normal();
        out[k] = v;
      }
      break;
    }
    case Anchor::Kind::kAfter: {
      const double t_last = t0 + static_cast<double>(n - 1) * dt;
      double v = drift * t_last + std::sqrt(-diffusion * t_last) * rng.normal();
      out[n - 1] = v;
      for (std::size_t k = n - 1; k-- > 0;) {
        v -= drift * dt + sd_step * rng.normal();
        out[k] = v;
      }
      break;
    }
    case Anchor::Kind::kInside: {
      // Independent substreams per side, so grids of different extent share
      // their common values.
      Rng right = rng.split(0), left = rng.split(1);
      out[a.index] = 0.0;
      double v = 0.0;
      for (std::size_t k = a.index + 1; k < n; ++k) {
        v += drift * dt + sd_step * right.normal();
        out[k] = v;
      }
      v = 0.0;
      for (std::size_t k = a.index; k-- > 0;) {
        v -= drift * dt + sd_step * left.normal();
        out[k] = v;
      }
      break;
    }
  }
}

}  // namespace

SampledPath::SampledPath(double t0_, double dt_, std::vector<double> values_)
    : t0(t0_), dt(dt_), values(std::move(values_)) {
  if (!(dt > 0.0)) throw std::invalid_argument("SampledPath: dt must be > 0");
  if (values.empty()) throw std::invalid_argument("SampledPath: empty");
}

std::size_t SampledPath::index_of(double t) const {
  const double k = (t - t0) / dt;
  const double kr = std::round(k);
  if (std::abs(k - kr) > kGridTol * std::max(1.0, std::abs(k)) || kr < 0.0 ||
      kr > static_cast<double>(values.size() - 1)) {
    throw std::out_of_range("time " + std::to_string(t) +
                            " is not a grid point of the path");
  }
  return static_cast<std::size_t>(kr);
}

double SampledPath::at(double t) const {
  const double k = (t - t0) / dt;
  const double last = static_cast<double>(values.size() - 1);
  if (k < -kGridTol || k > last + kGridTol) {
    throw std::out_of_range("time " + std::to_string(t) + " outside the path");
  }
  const double kr = std::round(k);
  if (std::abs(k - kr) <= kGridTol * std::max(1.0, std::abs(k))) {
    return values[static_cast<std::size_t>(std::clamp(kr, 0.0, last))];
  }
  const double kc = std::clamp(k, 0.0, last);
  const auto i = static_cast<std::size_t>(std::floor(kc));
  if (i + 1 >= values.size()) return values.back();
  const double w = kc - static_cast<double>(i);
  return (1.0 - w) * values[i] + w * values[i + 1];
}

SampledPath SampledPath::restrict(double t_lo, double t_hi) const {
  const std::size_t lo = index_of(t_lo);
  const std::size_t hi = index_of(t_hi);
  if (hi < lo) throw std::invalid_argument("restrict: empty interval");
  return SampledPath(time(lo), dt,
                     std::vector<double>(values.begin() + static_cast<long>(lo),
                                         values.begin() + static_cast<long>(hi) + 1));
}

SampledPath sample_brownian(Rng& rng, double t0, double dt, std::size_t n,
                            double drift, double diffusion) {
  check_grid(dt, n);
  if (!(diffusion >= 0.0)) {
    throw std::invalid_argument("diffusion must be nonnegative");
  }
  std::vector<double> v(n);
  fill_brownian(rng, t0, dt, drift, std::sqrt(diffusion * dt), diffusion, v);
  return SampledPath(t0, dt, std::move(v));
}

SampledPath sample_bessel3(Rng& rng, double t0, double dt, std::size_t n) {
  check_grid(dt, n);
  std::array<std::vector<double>, 3> coords;
  for (std::size_t i = 0; i < 3; ++i) {
    coords[i].resize(n);
    Rng sub = rng.split(10 + i);
    fill_brownian(sub, t0, dt, 0.0, std::sqrt(dt), 1.0, coords[i]);
  }
  std::vector<double> v(n);
  for (std::size_t k = 0; k < n; ++k) {
    v[k] = std::hypot(coords[0][k], coords[1][k], coords[2][k]);
  }
  return SampledPath(t0, dt, std::move(v));
}

SampledPath sample_brownian_bridge(Rng& rng, double dt, std::size_t n,
                                   double diffusion) {
  check_grid(dt, n);
  if (std::abs(dt * static_cast<double>(n) - 1.0) > 1e-9) {
    throw std::invalid_argument("bridge grid must cover [0, 1]: dt * n != 1");
  }
  if (!(diffusion > 0.0)) throw std::invalid_argument("diffusion must be > 0");
  SampledPath w = sample_brownian(rng, 0.0, dt, n + 1, 0.0, diffusion);
  const double end = w.values.back();
  for (std::size_t k = 0; k <= n; ++k) {
    w.values[k] -= w.time(k) * end;
  }
  w.values.back() = 0.0;
  return w;
}

double meander_weight(const SampledPath& bessel_path) {
  std::size_t k = 0;
  try {
    k = bessel_path.index_of(1.0);
  } catch (const std::out_of_range&) {
    throw std::invalid_argument("meander_weight: path does not cover time 1");
  }
  const double r1 = bessel_path.values[k];
  if (!(r1 > 0.0)) throw std::invalid_argument("meander_weight: R(1) must be > 0");
  return std::sqrt(std::numbers::pi / 2.0) / r1;
}

}  // namespace kpzlab
