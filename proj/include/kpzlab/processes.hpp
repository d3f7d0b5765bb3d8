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

#include <cstddef>
#include <span>
#include <vector>

#include "kpzlab/rng.hpp"

namespace kpzlab {

/// A real-valued function sampled on the uniform grid t0 + k * dt.
struct SampledPath {
  double t0 = 0.0;
  double dt = 1.0;
  std::vector<double> values;

  SampledPath() = default;
  SampledPath(double t0_, double dt_, std::vector<double> values_);

  std::size_t size() const { return values.size(); }
  double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
  double t_end() const { return time(values.size() - 1); }

  /// Grid index of time t; throws std::out_of_range unless t is a grid point
  /// (to within 1e-9 grid steps).
  std::size_t index_of(double t) const;

  /// Linear interpolation between neighbouring grid values.
  double at(double t) const;

  /// Sub-path on [t_lo, t_hi]; both ends must be grid points.
  SampledPath restrict(double t_lo, double t_hi) const;
};

/// Brownian motion with the given drift and diffusion (variance per unit
/// time), pinned to 0 at time 0. Grids that straddle 0 must contain it; the
/// two sides are sampled as independent one-sided paths from the anchor.
SampledPath sample_brownian(Rng& rng, double t0, double dt, std::size_t n,
                            double drift = 0.0, double diffusion = 1.0);

/// Bessel-3 process: the norm of a standard three-dimensional Brownian motion,
/// two-sided with the same anchor convention as sample_brownian.
SampledPath sample_bessel3(Rng& rng, double t0, double dt, std::size_t n);

/// Brownian bridge on [0, 1] with n steps (n + 1 values, both ends 0).
SampledPath sample_brownian_bridge(Rng& rng, double dt, std::size_t n,
                                   double diffusion = 1.0);

/// sqrt(pi/2) / R(1): density of Brownian meander against Bessel-3 on [0, 1].
double meander_weight(const SampledPath& bessel_path);

}  // namespace kpzlab
