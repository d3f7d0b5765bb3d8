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
#include <string>
#include <vector>

#include "kpzlab/geodesic_analysis.hpp"
#include "kpzlab/landscape.hpp"
#include "kpzlab/limit_environment.hpp"
#include "kpzlab/rng.hpp"
#include "kpzlab/stats.hpp"

namespace kpzlab {

/// Lattice used by the geodesic experiments: n lines per unit time on the
/// window [-half_window, half_window], cells_per_shift grid cells per line
/// shift, with the grid bias calibrated from calibration_samples fields.
struct LatticeParams {
  int n = 512;
  int cells_per_shift = 4;
  double half_window = 1.5;
  int calibration_samples = 2000;
  std::uint64_t calibration_seed = 0x6b707a2d63616cULL;
  bool calibrate = true;
  double grid_step = 0.0;  // overrides a_n / cells_per_shift when > 0

  double delta() const;
  /// half_window rounded to a whole number of grid steps, so that x = 0 is a
  /// grid point.
  double grid_half_window() const;
  /// Throws std::invalid_argument on nonpositive fields.
  void validate() const;
};

/// calibrate_scaling(...).scaling, cached per argument set for the lifetime of
/// the process.
LppScaling calibrated_scaling(int n, double delta, int samples, std::uint64_t seed);

/// Calibrated (or plain) scaling for the lattice.
LppScaling lattice_scaling(const LatticeParams& params);

/// Limit-environment parameters on the lattice's line count: grid step
/// snapped so that 1/delta is an integer, scaling calibrated on that step.
LimitParams limit_params(const LatticeParams& params, double M = 6.0);

/// Geodesic from (0, 0) to (0, 1) in a fresh field. Replica r of an
/// experiment draws its field from base.split(r).split(1).
struct GeodesicSample {
  LppField field;
  Geodesic geodesic;
  SampledPath weight;
  bool touches_edge = false;  // geodesic reaches the window boundary
};

GeodesicSample geodesic_sample(const Rng& base, std::size_t replica,
                               const LppScaling& scaling, const LatticeParams& params);

/// Time index of t on an n-line grid; t * n must be an integer.
int grid_time(double t, int n);

/// Rescaled spatial and weight increments over [s, s + eps^3] with eps^3 =
/// eps_lines / n, plus the transversal position pi(1/2).
struct IncrementSamples {
  double s = 0.5;
  int eps_lines = 1;
  double eps = 0.0;
  std::vector<double> I;
  std::vector<double> W;
  std::vector<double> transversal;
  /// Replicas whose passage values over consecutive eps^3 pieces of the
  /// geodesic do not add up to L(0,0;0,1) within 1e-9.
  std::size_t partition_failures = 0;
  std::size_t edge_contacts = 0;
};

IncrementSamples increment_samples(const Rng& base, const LatticeParams& params, double s,
                                   int eps_lines, std::size_t n_samples, int workers = 1);

enum class VariationTarget { kPath, kWeight };

const char* target_name(VariationTarget t);
/// 3/2 for paths, 3 for weights.
double critical_alpha(VariationTarget t);

struct VariationSeries {
  VariationTarget target = VariationTarget::kPath;
  double alpha = 1.5;
};

struct VariationSpec {
  std::vector<VariationSeries> series;
  /// Scales eps = k / n (k lines).
  std::vector<int> eps_lines{4, 8, 16, 32};
  double a = 0.0;
  double b = 1.0;
};

struct VariationRow {
  VariationSeries series;
  int eps_lines = 1;
  double eps = 0.0;
  MomentEstimate full;  // V on [a, b]
  MomentEstimate half;  // V on [a, (a + b) / 2]
  /// |half - full / 2| within 1.96 sqrt(se_half^2 + se_full^2 / 4).
  bool linear() const;
};

struct VariationSlope {
  VariationSeries series;
  LinearFit fit;  // log mean V on log eps
};

struct VariationResult {
  std::vector<VariationRow> rows;
  std::vector<VariationSlope> slopes;
  std::size_t n_samples = 0;
  std::size_t edge_contacts = 0;
};

VariationResult variation_sweep(const Rng& base, const LatticeParams& params,
                                const VariationSpec& spec, std::size_t n_samples,
                                int workers = 1);

struct IndependenceResult {
  double t1 = 0.25, t2 = 0.75;
  int eps_lines = 1;
  double eps = 0.0;
  ConfidenceInterval corr;
  std::size_t n_samples = 0;
};

/// Correlation of |I_{t1,eps}| and |I_{t2,eps}| along the same geodesic, with
/// a percentile bootstrap interval.
IndependenceResult independence_experiment(const Rng& base, const LatticeParams& params,
                                           double t1, double t2, int eps_lines,
                                           std::size_t n_samples, int workers = 1,
                                           int resamples = 1000);

struct EnvironmentProbe {
  double z = 0.0;
  TwoSampleResult bessel;    // -(F + G) / 2 against R(z)
  TwoSampleResult brownian;  // (F - G) / 2 against B(z)
};

struct EnvironmentScale {
  int eps_lines = 1;
  double eps = 0.0;
  std::vector<EnvironmentProbe> probes;
  /// Replicas with F(z) + G(z) > 0 at some grid z.
  std::size_t sign_violations = 0;
};

struct EnvironmentResult {
  double r = 0.5;
  std::vector<EnvironmentScale> scales;
  std::size_t n_samples = 0;
};

/// Reference R(z), B(z) come from the direct samplers on base.split(kReferenceTag).
EnvironmentResult environment_experiment(const Rng& base, const LatticeParams& params,
                                         double r, const std::vector<int>& eps_lines,
                                         const std::vector<double>& probes,
                                         std::size_t n_samples, int workers = 1);

struct HolderRow {
  int resolution = 0;
  double median_pi = 0.0;
  double median_W = 0.0;
  double median_log_pi = 0.0;
  double median_log_W = 0.0;
};

struct HolderResult {
  std::vector<HolderRow> rows;
  /// Replicas whose statistics decrease between nested resolutions.
  std::size_t monotonicity_violations = 0;
  std::size_t n_samples = 0;
};

/// Hoelder ratios of pi (2/3, log^{1/3}) and W (1/3, log^{2/3}) on the
/// geodesic sampled at `resolution` equally spaced times.
HolderResult holder_experiment(const Rng& base, const LatticeParams& params,
                               const std::vector<int>& resolutions, std::size_t n_samples,
                               int workers = 1);

struct InvarianceCheck {
  std::string name;
  TwoSampleResult ks;
  double mean_a = 0.0;
  double mean_b = 0.0;
};

/// Distributional symmetries on two independent fields per replica:
/// scaling L(0,0;0,1) vs 2^{1/3} L(0,0;0,1/2), translation L(0,0;1/2,1) vs
/// L(-1/2,0;0,1), reflection L(0,0;1/2,1) vs L(0,0;-1/2,1).
std::vector<InvarianceCheck> invariance_experiment(const Rng& base,
                                                   const LatticeParams& params,
                                                   std::size_t n_samples, int workers = 1);

/// Best staircase by enumerating all breakpoint sequences (small fields only).
double brute_force_passage(const LppField& field, GridPoint start, GridPoint end,
                           std::vector<std::size_t>* best_breakpoints = nullptr);

struct SelftestResult {
  std::size_t oracle_instances = 0;
  std::size_t oracle_failures = 0;
  std::size_t triples = 0;
  std::size_t composition_failures = 0;
  std::size_t triangle_failures = 0;
  std::size_t weight_paths = 0;
  std::size_t weight_failures = 0;
  double max_error = 0.0;
  bool passed() const {
    return oracle_failures == 0 && composition_failures == 0 && triangle_failures == 0 &&
           weight_failures == 0 && oracle_instances >= 100 && triples >= 1000;
  }
};

SelftestResult run_selftest(const Rng& base, std::size_t instances = 200,
                            std::size_t triples = 2000);

}  // namespace kpzlab
