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
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "kpzlab/processes.hpp"
#include "kpzlab/rng.hpp"

namespace kpzlab {

inline constexpr double kBottom = -std::numeric_limits<double>::infinity();

/// Mean of the GUE Tracy-Widom law, the one-point law of L(0, 0; 0, 1).
inline constexpr double kTracyWidomGueMean = -1.7710868074116;

/// Scaling dictionary between Brownian last passage with n lines per unit
/// time and the directed landscape. Lines carry drift -2 n^{1/3} and
/// diffusion 2; each line transition shifts space by a_n = n^{-2/3}/2 and
/// adds b_n = -n^{-1/3}.
///
/// Restricting breakpoints to a spatial grid loses O(sqrt(delta)) per line
/// and tilts the profile; `centering` (added per line) and
/// `drift_correction` (added to the drift) compensate for a given grid, see
/// calibrate_scaling().
struct LppScaling {
  int n = 1;
  double drift = 0.0;
  double diffusion = 2.0;
  double shift_per_line = 0.0;
  double bonus_per_line = 0.0;
  double centering = 0.0;
  double drift_correction = 0.0;

  static LppScaling for_lines(int n);

  double line_drift() const { return drift + drift_correction; }
  double line_bonus() const { return bonus_per_line + centering; }
  /// Grid step giving `cells` cells per line shift.
  double delta_for_cells(int cells) const { return shift_per_line / cells; }
};

/// Discretized Brownian last passage environment.
///
/// Space uses a common grid of "raw" boundary positions u = 0 .. raw_cells().
/// A rescaled location x at time index i (time i/n) sits at raw boundary
/// x_index(x) + shift(i). Staircases stay inside [x_min, x_max] at every
/// line time, so line j (1-based) only stores the raw cells
/// [shift(j - 1), shift(j) + window_cells()).
class LppField {
 public:
  using Line = std::shared_ptr<const std::vector<double>>;

  LppField(const LppScaling& scaling, double x_min, double x_max, double delta,
           std::vector<Line> lines, std::uint64_t seed);

  int n() const { return scaling_.n; }
  const LppScaling& scaling() const { return scaling_; }
  double a_n() const { return scaling_.shift_per_line; }
  double b_n() const { return scaling_.bonus_per_line; }
  /// Per-line bonus actually applied to landscape values (b_n + centering).
  double bonus() const { return scaling_.line_bonus(); }
  double x_min() const { return x_min_; }
  double x_max() const { return x_max_; }
  double delta() const { return delta_; }
  std::uint64_t seed() const { return seed_; }
  std::uint64_t id() const { return id_; }

  /// Cells of the rescaled window.
  std::size_t window_cells() const { return m_; }
  /// Extent of the raw grid; boundaries run over 0 .. raw_cells().
  std::size_t raw_cells() const { return raw_cells_; }
  /// Raw offset of time index i, in cells.
  std::size_t shift(int time_index) const;

  /// Stored increments of line j (1-based); entry k is raw cell line_offset(j) + k.
  std::span<const double> line(int j) const;
  std::size_t line_offset(int j) const { return shift(j - 1); }
  std::size_t line_cells(int j) const;
  /// Increment of line j on raw cell u (must be stored).
  double increment(int j, std::size_t u) const { return line(j)[u - line_offset(j)]; }
  const Line& line_handle(int j) const { return lines_.at(static_cast<std::size_t>(j - 1)); }

  /// Time index floor(t * n); throws std::out_of_range outside [0, 1].
  int time_index(double t) const;
  /// Nearest window index of rescaled x; throws std::out_of_range outside.
  std::size_t x_index(double x) const;
  double x_of(std::size_t xi) const { return x_min_ + static_cast<double>(xi) * delta_; }
  /// Raw boundary of window index xi at time index i.
  std::size_t raw_of(std::size_t xi, int time_index) const { return xi + shift(time_index); }
  /// Rescaled location of raw boundary u at time index i (may lie outside the window).
  double x_of_raw(std::size_t u, int time_index) const;

  /// Binary checkpoint: header (n, x_min, x_max, delta, seed, centering,
  /// drift correction) followed by the stored increments line by line.
  void save(std::ostream& os) const;
  static LppField load(std::istream& is);

 private:
  LppScaling scaling_;
  double x_min_, x_max_, delta_;
  std::size_t m_ = 0;
  std::size_t raw_cells_ = 0;
  std::vector<std::size_t> shifts_;
  std::vector<Line> lines_;
  std::uint64_t seed_ = 0;
  std::uint64_t id_ = 0;
};

/// Raw grid point: boundary position on a given line.
struct GridPoint {
  std::size_t pos = 0;
  int line = 1;
};

enum class TieBreak { kLeftmost, kRightmost };

/// Monotone staircase through the field.
///
/// `breakpoints[k]` is the raw boundary where the path leaves line
/// line_lo + k - 1 and enters line line_lo + k; the first entry is the start
/// position and the last the end position, so there are
/// (line_hi - line_lo + 2) entries. `path` gives the rescaled location at
/// the times (line_lo - 1)/n, ..., line_hi/n.
struct Geodesic {
  int line_lo = 1;
  int line_hi = 1;
  std::vector<std::size_t> breakpoints;
  SampledPath path;
  double raw_value = 0.0;
  /// raw_value plus the per-line bonus, i.e. the landscape value.
  double value = 0.0;
  std::uint64_t field_id = 0;

  int lines() const { return line_hi - line_lo + 1; }
};

/// Rescaled landscape coordinates (x, s; y, t) with s < t.
struct LandscapeQuery {
  double x = 0.0, s = 0.0, y = 0.0, t = 1.0;
};

LppField build_field(Rng& rng, int n, double x_min, double x_max, double delta);
LppField build_field(Rng& rng, const LppScaling& scaling, double x_min, double x_max,
                     double delta);

struct ScalingCalibration {
  LppScaling scaling;
  double tilt = 0.0;        // linear coefficient of E L(0,0;y,1) before correction
  double curvature = 0.0;   // minus the quadratic coefficient (1 in the limit)
  double variance = 0.0;    // Var L(0,0;0,1) (0.8132 in the limit)
  int samples = 0;
};

/// Estimates centering and drift correction for an n-line field on grid
/// step delta: fits E[L(0,0;y,1) - L(0,0;0,1)] = tilt*y - curvature*y^2 over
/// |y| <= 1 and matches E L(0,0;0,1) to the Tracy-Widom GUE mean.
ScalingCalibration calibrate_scaling(int n, double delta, int samples,
                                     std::uint64_t seed);

/// Maximal increment sum over monotone staircases from start to end.
double raw_last_passage(const LppField& field, GridPoint start, GridPoint end);

/// values[u] = raw_last_passage(start, (u, end_line)) for all raw u, with
/// kBottom where no staircase exists (u < start.pos or u outside the window).
std::vector<double> passage_profile(const LppField& field, GridPoint start,
                                    int end_line);

/// values[u] = raw_last_passage((u, start_line), end), kBottom for u > end.pos.
std::vector<double> passage_profile_to(const LppField& field, GridPoint end,
                                       int start_line);

Geodesic extract_geodesic(const LppField& field, GridPoint start, GridPoint end,
                          TieBreak tie_break = TieBreak::kLeftmost);

/// Approximate landscape value; kBottom when no staircase connects the
/// points. Throws std::out_of_range outside the window or for t <= s on the
/// line grid.
double landscape_approx(const LppField& field, const LandscapeQuery& q);
double landscape_at(const LppField& field, std::size_t xi, int ti, std::size_t yi,
                    int tj);

/// Geodesic of the approximate landscape between two rescaled points.
Geodesic landscape_geodesic(const LppField& field, const LandscapeQuery& q,
                            TieBreak tie_break = TieBreak::kLeftmost);

/// y -> L(x, s; y, t) over the window at time index tj (kBottom off the cone).
std::vector<double> landscape_profile_from(const LppField& field, std::size_t xi,
                                           int ti, int tj);
/// x -> L(x, s; y, t) over the window at time index ti.
std::vector<double> landscape_profile_to(const LppField& field, std::size_t yi,
                                         int tj, int ti);

/// h_t(y) = max_x h0(x) + L(x, s; y, t) on the window grid; h0 uses kBottom
/// for -infinity.
std::vector<double> kpz_evolve(const LppField& field, std::span<const double> h0,
                               double s, double t);

/// Maximizer of f(x) + L(x, s; y, t) + g(y) over window indices.
struct BoundaryGeodesic {
  std::size_t x_index = 0;
  std::size_t y_index = 0;
  double length = 0.0;     // L(X, s; Y, t)
  double objective = 0.0;  // f(X) + length + g(Y)
  Geodesic geodesic;
};

BoundaryGeodesic boundary_geodesic(const LppField& field, std::span<const double> f,
                                   int ti, std::span<const double> g, int tj,
                                   TieBreak tie_break = TieBreak::kLeftmost);

/// Copy of `field` whose lines covering times in [time_lo, time_hi) are
/// redrawn from `rng`; all other lines are shared with the original.
LppField resample_field(const LppField& field, Rng& rng, double time_lo,
                        double time_hi);

}  // namespace kpzlab
