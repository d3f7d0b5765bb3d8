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
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "kpzlab/rng.hpp"

namespace kpzlab {

/// Raised when samples cannot support an estimate.
class EstimationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Fit of P(|Z| > m) ~ c exp(-d m^beta).
struct TailFit {
  double beta_hat = 0.0;
  double intercept = 0.0;  // log d
  double r_squared = 0.0;
  double band_lo = 0.5;
  double band_hi = 0.99;
  std::size_t n_samples = 0;
  std::size_t n_points = 0;  // distinct sample values inside the band
};

inline constexpr std::size_t kMinTailSamples = 500;

/// Least squares of log(-log S(m)) on log m over sample values whose
/// empirical CDF lies in [band_lo, band_hi]. S uses mid-ranks, with tied
/// values collapsed to one point. Samples are absolute values (signs are
/// dropped); zeros are skipped.
TailFit fit_tail_exponent(std::span<const double> samples, double band_lo = 0.5,
                          double band_hi = 0.99);

/// Empirical survival P(X > m) at the given points.
std::vector<double> empirical_survival(std::span<const double> samples,
                                       std::span<const double> points);

struct TwoSampleResult {
  double statistic = 0.0;
  double threshold = 0.0;
  bool below() const { return statistic < threshold; }
};

/// Kolmogorov-Smirnov sup distance between the two empirical CDFs, with the
/// asymptotic two-sample critical value c(alpha) sqrt((n + m) / (n m)),
/// c(alpha) = sqrt(-log(alpha / 2) / 2).
TwoSampleResult two_sample_distance(std::span<const double> a, std::span<const double> b,
                                    double alpha = 0.01);

double mean(std::span<const double> x);
/// Standard error of the mean (sample sd / sqrt(n)).
double standard_error(std::span<const double> x);
double median(std::span<const double> x);
double pearson(std::span<const double> x, std::span<const double> y);

struct ConfidenceInterval {
  double estimate = 0.0;
  double lo = 0.0;
  double hi = 0.0;
  bool covers(double v) const { return lo <= v && v <= hi; }
};

/// Pearson correlation with a percentile bootstrap interval over paired
/// resamples.
ConfidenceInterval bootstrap_correlation(std::span<const double> x,
                                         std::span<const double> y, int resamples,
                                         Rng& rng, double level = 0.95);

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
  double slope_se = 0.0;
};

LinearFit linear_fit(std::span<const double> x, std::span<const double> y);

/// Mean of |sample|^exponent.
struct MomentEstimate {
  double mean = 0.0;
  double std_error = 0.0;
  std::size_t n_samples = 0;
  double exponent = 1.0;

  double ci_lo(double z = 1.959963984540054) const { return mean - z * std_error; }
  double ci_hi(double z = 1.959963984540054) const { return mean + z * std_error; }
};

/// Running (count, sum, sum of squares) of powered samples; merge() is an
/// associative, commutative combine.
class MomentAccumulator {
 public:
  explicit MomentAccumulator(double exponent = 1.0) : exponent_(exponent) {}

  void add(double sample);
  void merge(const MomentAccumulator& other);
  std::size_t count() const { return count_; }
  double exponent() const { return exponent_; }
  /// Throws EstimationError with fewer than 2 samples.
  MomentEstimate estimate() const;

 private:
  double exponent_;
  std::size_t count_ = 0;
  double sum_ = 0.0;
  double sumsq_ = 0.0;
};

MomentEstimate estimate_moment(std::span<const double> samples, double exponent);

}  // namespace kpzlab
