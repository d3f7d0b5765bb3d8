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
#include <vector>

#include "kpzlab/landscape.hpp"
#include "kpzlab/processes.hpp"

namespace kpzlab {

/// W(r) = L(pi(s), s; pi(r), r) along the geodesic, on the geodesic's time grid.
SampledPath weight_function(const LppField& field, const Geodesic& g);

/// Sum over u in [t0 + eps, t_end] on the eps-lattice of |f(u) - f(u - eps)|^alpha.
/// eps must be a positive integer multiple of f.dt.
double variation(const SampledPath& f, double alpha, double eps);

/// eps with eps^3 equal to `lines` line spacings of an n-line field.
double eps_for_lines(int lines, int n);

/// Rescaled landscape around (X, r) at scale eps. Holds a non-owning pointer
/// to the field it was built from.
class RescaledLandscape {
 public:
  RescaledLandscape() = default;
  RescaledLandscape(const LppField* field, double x_center, double r, double eps)
      : field_(field), x_center_(x_center), r_(r), eps_(eps) {}

  /// L(X + eps^2 z, r + eps^3 s; X + eps^2 y, r + eps^3 t) / eps.
  double operator()(double z, double s, double y, double t) const;

 private:
  const LppField* field_ = nullptr;
  double x_center_ = 0.0, r_ = 0.0, eps_ = 1.0;
};

struct EnvironmentQuintuple {
  double eps = 0.0;
  double r = 0.0;
  double x_eps = 0.0;          // recentering location X
  std::size_t x_index = 0;     // window index of X
  SampledPath F;               // z-grid, F(0) = 0
  SampledPath G;               // z-grid, G(0) = 0
  RescaledLandscape L;
  SampledPath pi;              // on [0, 1]
  SampledPath W;               // on [0, 1], W(0) = 0
};

/// Environment around (g, r) at scale eps. eps^3 must be a whole number of
/// line spacings and [r, r + eps^3] must lie strictly inside the geodesic's
/// time span.
EnvironmentQuintuple rescale_environment(const LppField& field, const Geodesic& g,
                                         double r, double eps);

struct OverlapResult {
  /// Lines on which both paths run along the same segment.
  std::vector<int> lines;
  bool contiguous = true;
};

OverlapResult overlap(const Geodesic& g1, const Geodesic& g2);

/// sup over grid pairs of |f(t) - f(s)| / (|t - s|^exponent log^log_power(2/|t - s|)).
///
/// Exhaustive over all pairs up to `exhaustive_limit` points; above it, lags
/// whose bound osc(f) / denominator cannot beat the running maximum are
/// skipped (lags are visited in increasing order, so the result is unchanged).
double holder_statistic(const SampledPath& f, double exponent, double log_power,
                        std::size_t exhaustive_limit = 4096);

}  // namespace kpzlab
