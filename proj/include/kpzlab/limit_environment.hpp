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

#include "kpzlab/landscape.hpp"
#include "kpzlab/rng.hpp"
#include "kpzlab/stats.hpp"

namespace kpzlab {

/// Maximizer of B(x) - R(x) + L(x, 0; y, 1) - B(y) - R(y) over [-M, M]^2.
struct LimitSample {
  double X = 0.0;
  double Y = 0.0;
  double length = 0.0;     // L(X, 0; Y, 1)
  double objective = 0.0;
  double window = 0.0;     // M
  std::size_t x_index = 0;
  std::size_t y_index = 0;
};

struct LimitParams {
  LppScaling scaling;
  double M = 6.0;
  double delta = 1.0 / 64;

  /// Uncalibrated n-line scaling, M = 6, and the grid step nearest to
  /// a_n / cells_per_shift with 1/delta an integer (so +-M are grid points
  /// for integer M).
  static LimitParams for_lines(int n, int cells_per_shift = 4);
};

/// Exact grid argmax for a given field on [-M, M] (window_cells + 1 points)
/// and boundary arrays B, R sampled on the same grid.
LimitSample solve_limit_environment(const LppField& field, std::span<const double> B,
                                    std::span<const double> R);

/// One replica: landscape from rng.split(1), B from rng.split(2), R from
/// rng.split(3), both with diffusion 1.
LimitSample sample_limit_environment(Rng& rng, const LimitParams& params);
LimitSample sample_limit_environment(Rng& rng, int n, double M, double delta);

/// Replica r uses base.split(r).
std::vector<LimitSample> limit_samples(const Rng& base, const LimitParams& params,
                                       std::size_t n_samples, int workers = 1);

/// E|Y - X|^{3/2}.
MomentEstimate estimate_nu(const Rng& base, const LimitParams& params,
                           std::size_t n_samples, int workers = 1);
/// E|length|^3.
MomentEstimate estimate_mu(const Rng& base, const LimitParams& params,
                           std::size_t n_samples, int workers = 1);

MomentEstimate nu_from(std::span<const LimitSample> samples);
MomentEstimate mu_from(std::span<const LimitSample> samples);

struct LimitTailArrays {
  std::vector<double> abs_x;
  std::vector<double> abs_span;    // |Y - X|
  std::vector<double> abs_length;
};

LimitTailArrays tail_samples_boundary_argmax(const Rng& base, const LimitParams& params,
                                             std::size_t n_samples, int workers = 1);
LimitTailArrays tail_arrays(std::span<const LimitSample> samples);

}  // namespace kpzlab
