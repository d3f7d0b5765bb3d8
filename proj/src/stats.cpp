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

#include "kpzlab/stats.hpp"

#include <algorithm>
#include <cmath>

namespace kpzlab {

TailFit fit_tail_exponent(std::span<const double> samples, double band_lo,
                          double band_hi) {
  if (!(band_lo >= 0.01 && band_lo < band_hi && band_hi <= 0.99)) {
    throw std::invalid_argument("tail band must satisfy 0.01 <= lo < hi <= 0.99");
  }
  if (samples.size() < kMinTailSamples) {
    throw EstimationError("tail fit needs at least " + std::to_string(kMinTailSamples) +
                          " samples, got " + std::to_string(samples.size()));
  }
  std::vector<double> v(samples.size());
  std::transform(samples.begin(), samples.end(), v.begin(),
                 [](double x) { return std::abs(x); });
  std::sort(v.begin(), v.end());
  const double n = static_cast<double>(v.size());
  std::vector<double> lx, ly;
  for (std::size_t i = 0; i < v.size();) {
    std::size_t k = i;
    while (k < v.size() && v[k] == v[i]) ++k;
    // Mid-rank CDF of the tied block [i, k).
    const double cdf = (static_cast<double>(i + k) / 2.0) / n;
    if (cdf >= band_lo && cdf <= band_hi && v[i] > 0.0) {
      lx.push_back(std::log(v[i]));
      ly.push_back(std::log(-std::log(1.0 - cdf)));
    }
    i = k;
  }
  if (lx.size() < 10 || lx.front() == lx.back()) {
    throw EstimationError("tail fit: samples are degenerate inside the band");
  }
  const LinearFit lf = linear_fit(lx, ly);
  if (!(lf.slope > 0.0)) throw EstimationError("tail fit: non-positive exponent");
  TailFit out;
  out.beta_hat = lf.slope;
  out.intercept = lf.intercept;
  out.r_squared = lf.r_squared;
  out.band_lo = band_lo;
  out.band_hi = band_hi;
  out.n_samples = samples.size();
  out.n_points = lx.size();
  return out;
}

std::vector<double> empirical_survival(std::span<const double> samples,
                                       std::span<const double> points) {
  std::vector<double> v(samples.begin(), samples.end());
  std::sort(v.begin(), v.end());
  std::vector<double> out;
  out.reserve(points.size());
  for (double m : points) {
    const auto it = std::upper_bound(v.begin(), v.end(), m);
    out.push_back(static_cast<double>(v.end() - it) / static_cast<double>(v.size()));
  }
  return out;
}

TwoSampleResult two_sample_distance(std::span<const double> a, std::span<const double> b,
                                    double alpha) {
  if (a.empty() || b.empty()) throw std::invalid_argument("two-sample distance: empty input");
  if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("alpha must be in (0, 1)");
  std::vector<double> x(a.begin(), a.end()), y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double nx = static_cast<double>(x.size()), ny = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / nx - static_cast<double>(j) / ny));
  }
  TwoSampleResult r;
  r.statistic = d;
  r.threshold = std::sqrt(-std::log(alpha / 2.0) / 2.0) * std::sqrt((nx + ny) / (nx * ny));
  return r;
}

double mean(std::span<const double> x) {
  if (x.empty()) throw EstimationError("mean of an empty sample");
  double s = 0.0;
  for (double v : x) s += v;
  return s / static_cast<double>(x.size());
}

double standard_error(std::span<const double> x) {
  if (x.size() < 2) throw EstimationError("standard error needs at least 2 samples");
  const double m = mean(x);
  double ss = 0.0;
  for (double v : x) ss += (v - m) * (v - m);
  const double n = static_cast<double>(x.size());
  return std::sqrt(ss / (n - 1.0) / n);
}

double median(std::span<const double> x) {
  if (x.empty()) throw EstimationError("median of an empty sample");
  std::vector<double> v(x.begin(), x.end());
  const std::size_t h = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(h), v.end());
  if (v.size() % 2 == 1) return v[h];
  const double upper = v[h];
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<long>(h));
  return 0.5 * (lower + upper);
}

double pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("pearson: need two equal-length samples of size >= 2");
  }
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0 || syy == 0.0) throw EstimationError("pearson: constant sample");
  return sxy / std::sqrt(sxx * syy);
}

ConfidenceInterval bootstrap_correlation(std::span<const double> x,
                                         std::span<const double> y, int resamples,
                                         Rng& rng, double level) {
  if (resamples < 10) throw std::invalid_argument("bootstrap needs >= 10 resamples");
  ConfidenceInterval ci;
  ci.estimate = pearson(x, y);
  const std::size_t n = x.size();
  std::vector<double> rx(n), ry(n), stats;
  stats.reserve(static_cast<std::size_t>(resamples));
  for (int b = 0; b < resamples; ++b) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = rng.next_u64() % n;
      rx[i] = x[k];
      ry[i] = y[k];
    }
    try {
      stats.push_back(pearson(rx, ry));
    } catch (const EstimationError&) {
      // constant resample; skip
    }
  }
  if (stats.size() < 10) throw EstimationError("bootstrap: too many degenerate resamples");
  std::sort(stats.begin(), stats.end());
  const double a = (1.0 - level) / 2.0;
  const auto at = [&](double q) {
    const double pos = q * static_cast<double>(stats.size() - 1);
    const auto k = static_cast<std::size_t>(pos);
    const double w = pos - static_cast<double>(k);
    return k + 1 < stats.size() ? (1 - w) * stats[k] + w * stats[k + 1] : stats[k];
  };
  ci.lo = at(a);
  ci.hi = at(1.0 - a);
  return ci;
}

LinearFit linear_fit(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) {
    throw std::invalid_argument("linear_fit: need two equal-length samples of size >= 2");
  }
  const double mx = mean(x), my = mean(y);
  double sxy = 0, sxx = 0, syy = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
    syy += (y[i] - my) * (y[i] - my);
  }
  if (sxx == 0.0) throw EstimationError("linear_fit: constant regressor");
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  const double sse = std::max(syy - f.slope * sxy, 0.0);
  f.r_squared = syy > 0.0 ? std::clamp(1.0 - sse / syy, 0.0, 1.0) : 1.0;
  const double n = static_cast<double>(x.size());
  f.slope_se = n > 2 ? std::sqrt(sse / (n - 2.0) / sxx) : 0.0;
  return f;
}

void MomentAccumulator::add(double sample) {
  const double v = std::pow(std::abs(sample), exponent_);
  ++count_;
  sum_ += v;
  sumsq_ += v * v;
}

void MomentAccumulator::merge(const MomentAccumulator& other) {
  if (other.exponent_ != exponent_) {
    throw std::invalid_argument("cannot merge moment accumulators of different exponents");
  }
  count_ += other.count_;
  sum_ += other.sum_;
  sumsq_ += other.sumsq_;
}

MomentEstimate MomentAccumulator::estimate() const {
  if (count_ < 2) throw EstimationError("moment estimate needs at least 2 samples");
  MomentEstimate e;
  const double n = static_cast<double>(count_);
  e.mean = sum_ / n;
  const double var = std::max((sumsq_ - n * e.mean * e.mean) / (n - 1.0), 0.0);
  e.std_error = std::sqrt(var / n);
  // Equal samples: rounding can leave a tiny positive variance.
  if (e.std_error <= 1e-12 * std::abs(e.mean)) e.std_error = 0.0;
  e.n_samples = count_;
  e.exponent = exponent_;
  return e;
}

MomentEstimate estimate_moment(std::span<const double> samples, double exponent) {
  MomentAccumulator acc(exponent);
  for (double v : samples) acc.add(v);
  return acc.estimate();
}

}  // namespace kpzlab
