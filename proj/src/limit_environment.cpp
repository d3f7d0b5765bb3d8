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

#include "kpzlab/limit_environment.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "kpzlab/parallel.hpp"
#include "kpzlab/processes.hpp"

namespace kpzlab {

LimitParams LimitParams::for_lines(int n, int cells_per_shift) {
  if (cells_per_shift < 1) throw std::invalid_argument("cells_per_shift must be >= 1");
  LimitParams p;
  p.scaling = LppScaling::for_lines(n);
  p.delta = 1.0 / std::round(1.0 / p.scaling.delta_for_cells(cells_per_shift));
  return p;
}

LimitSample solve_limit_environment(const LppField& field, std::span<const double> B,
                                    std::span<const double> R) {
  const std::size_t m = field.window_cells();
  if (B.size() != m + 1 || R.size() != m + 1) {
    throw std::invalid_argument("boundary arrays must have window_cells + 1 = " +
                                std::to_string(m + 1) + " values");
  }
  std::vector<double> f(m + 1), g(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    f[k] = B[k] - R[k];
    g[k] = -B[k] - R[k];
  }
  const auto bg = boundary_geodesic(field, f, 0, g, field.n());
  LimitSample s;
  s.x_index = bg.x_index;
  s.y_index = bg.y_index;
  s.X = field.x_of(bg.x_index);
  s.Y = field.x_of(bg.y_index);
  s.length = bg.length;
  s.objective = bg.objective;
  s.window = 0.5 * (field.x_max() - field.x_min());
  return s;
}

LimitSample sample_limit_environment(Rng& rng, const LimitParams& params) {
  const double M = params.M, delta = params.delta;
  if (!(M > 0.0) || !(delta > 0.0)) throw std::invalid_argument("need M > 0 and delta > 0");
  const double half_cells = M / delta;
  if (std::abs(half_cells - std::round(half_cells)) > 1e-9 * half_cells) {
    throw std::invalid_argument("window M = " + std::to_string(M) +
                                " is not a whole number of grid steps " +
                                std::to_string(delta));
  }
  Rng field_rng = rng.split(1), b_rng = rng.split(2), r_rng = rng.split(3);
  const LppField field = build_field(field_rng, params.scaling, -M, M, delta);
  const std::size_t pts = field.window_cells() + 1;
  const auto B = sample_brownian(b_rng, -M, delta, pts, 0.0, 1.0);
  const auto R = sample_bessel3(r_rng, -M, delta, pts);
  return solve_limit_environment(field, B.values, R.values);
}

LimitSample sample_limit_environment(Rng& rng, int n, double M, double delta) {
  LimitParams p;
  p.scaling = LppScaling::for_lines(n);
  p.M = M;
  p.delta = delta;
  return sample_limit_environment(rng, p);
}

std::vector<LimitSample> limit_samples(const Rng& base, const LimitParams& params,
                                       std::size_t n_samples, int workers) {
  return parallel_map(n_samples, workers, [&](std::size_t r) {
    Rng rng = base.split(r);
    return sample_limit_environment(rng, params);
  });
}

MomentEstimate nu_from(std::span<const LimitSample> samples) {
  MomentAccumulator acc(1.5);
  for (const auto& s : samples) acc.add(s.Y - s.X);
  return acc.estimate();
}

MomentEstimate mu_from(std::span<const LimitSample> samples) {
  MomentAccumulator acc(3.0);
  for (const auto& s : samples) acc.add(s.length);
  return acc.estimate();
}

MomentEstimate estimate_nu(const Rng& base, const LimitParams& params,
                           std::size_t n_samples, int workers) {
  if (n_samples < 2) throw std::invalid_argument("estimate_nu needs n_samples >= 2");
  return nu_from(limit_samples(base, params, n_samples, workers));
}

MomentEstimate estimate_mu(const Rng& base, const LimitParams& params,
                           std::size_t n_samples, int workers) {
  if (n_samples < 2) throw std::invalid_argument("estimate_mu needs n_samples >= 2");
  return mu_from(limit_samples(base, params, n_samples, workers));
}

LimitTailArrays tail_arrays(std::span<const LimitSample> samples) {
  LimitTailArrays t;
  for (const auto& s : samples) {
    t.abs_x.push_back(std::abs(s.X));
    t.abs_span.push_back(std::abs(s.Y - s.X));
    t.abs_length.push_back(std::abs(s.length));
  }
  return t;
}

LimitTailArrays tail_samples_boundary_argmax(const Rng& base, const LimitParams& params,
                                             std::size_t n_samples, int workers) {
  if (n_samples < 1) throw std::invalid_argument("need at least one sample");
  return tail_arrays(limit_samples(base, params, n_samples, workers));
}

}  // namespace kpzlab
