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

#include "kpzlab/geodesic_analysis.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace kpzlab {

SampledPath weight_function(const LppField& field, const Geodesic& g) {
  if (g.field_id != field.id()) {
    throw std::invalid_argument("weight_function: geodesic belongs to another field");
  }
  const double bonus = field.bonus();
  std::vector<double> w(g.breakpoints.size());
  w[0] = 0.0;
  double acc = 0.0;
  for (std::size_t k = 0; k + 1 < g.breakpoints.size(); ++k) {
    const int j = g.line_lo + static_cast<int>(k);
    double seg = 0.0;
    for (std::size_t c = g.breakpoints[k]; c < g.breakpoints[k + 1]; ++c) {
      seg += field.increment(j, c);
    }
    acc += seg + bonus;
    w[k + 1] = acc;
  }
  return SampledPath(g.path.t0, g.path.dt, std::move(w));
}

double variation(const SampledPath& f, double alpha, double eps) {
  if (!(alpha > 0.0)) throw std::invalid_argument("variation: alpha must be > 0");
  const double ratio = eps / f.dt;
  const double k = std::round(ratio);
  if (!(k >= 1.0) || std::abs(ratio - k) > 1e-9 * std::max(1.0, ratio)) {
    throw std::invalid_argument("variation: eps = " + std::to_string(eps) +
                                " is not a positive multiple of the grid step " +
                                std::to_string(f.dt));
  }
  // First lattice point u with u - eps >= t0.
  const double first = std::ceil((f.t0 + eps) / eps - 1e-9) * eps;
  const double last = f.t_end();
  double total = 0.0;
  for (double j = std::round(first / eps);; j += 1.0) {
    const double u = j * eps;
    if (u > last + 1e-9 * f.dt) break;
    const std::size_t hi = f.index_of(u);
    const std::size_t lo = f.index_of(u - eps);
    total += std::pow(std::abs(f.values[hi] - f.values[lo]), alpha);
  }
  return total;
}

double eps_for_lines(int lines, int n) {
  if (lines < 1 || n < 1) throw std::invalid_argument("eps_for_lines: need lines, n >= 1");
  return std::cbrt(static_cast<double>(lines) / n);
}

double RescaledLandscape::operator()(double z, double s, double y, double t) const {
  if (field_ == nullptr) throw std::logic_error("RescaledLandscape: no field");
  const double e2 = eps_ * eps_;
  const double e3 = e2 * eps_;
  return landscape_approx(*field_, {x_center_ + e2 * z, r_ + e3 * s,
                                    x_center_ + e2 * y, r_ + e3 * t}) /
         eps_;
}

namespace {

SampledPath recentred_profile(const std::vector<double>& prof, std::size_t center,
                              double dz, double eps) {
  std::size_t lo = center, hi = center;
  while (lo > 0 && prof[lo - 1] != kBottom) --lo;
  while (hi + 1 < prof.size() && prof[hi + 1] != kBottom) ++hi;
  std::vector<double> v(hi - lo + 1);
  for (std::size_t k = lo; k <= hi; ++k) v[k - lo] = (prof[k] - prof[center]) / eps;
  return SampledPath(-static_cast<double>(center - lo) * dz, dz, std::move(v));
}

}  // namespace

EnvironmentQuintuple rescale_environment(const LppField& field, const Geodesic& g,
                                         double r, double eps) {
  if (g.field_id != field.id()) {
    throw std::invalid_argument("rescale_environment: geodesic belongs to another field");
  }
  if (!(eps > 0.0)) throw std::invalid_argument("rescale_environment: eps must be > 0");
  const int n = field.n();
  const double lines_exact = eps * eps * eps * n;
  const double lines = std::round(lines_exact);
  if (lines < 1.0 || std::abs(lines_exact - lines) > 1e-6 * lines) {
    throw std::invalid_argument("rescale_environment: eps^3 must be a whole number of "
                                "line spacings (got " + std::to_string(lines_exact) + ")");
  }
  const int k = static_cast<int>(lines);
  const int tp = g.line_lo - 1;
  const int tq = g.line_hi;
  const int ir = field.time_index(r);
  const int ir2 = ir + k;
  if (ir <= tp || ir2 >= tq) {
    throw std::out_of_range("rescale_environment: [r, r + eps^3] is not interior to "
                            "the geodesic");
  }
  const std::size_t xp = field.x_index(g.path.values.front());
  const std::size_t yq = field.x_index(g.path.values.back());

  const auto P = landscape_profile_from(field, xp, tp, ir);
  const auto Q = landscape_profile_to(field, yq, tq, ir2);
  std::size_t best = P.size();
  double best_val = kBottom;
  for (std::size_t xi = 0; xi < P.size(); ++xi) {
    const double v = P[xi] + Q[xi];
    if (v > best_val) {
      best_val = v;
      best = xi;
    }
  }
  if (best == P.size()) {
    throw std::out_of_range("rescale_environment: no window location reaches both ends");
  }

  EnvironmentQuintuple env;
  env.eps = eps;
  env.r = static_cast<double>(ir) / n;
  env.x_index = best;
  env.x_eps = field.x_of(best);
  const double e2 = eps * eps;
  const double dz = field.delta() / e2;
  env.F = recentred_profile(P, best, dz, eps);
  env.G = recentred_profile(Q, best, dz, eps);
  env.L = RescaledLandscape(&field, env.x_eps, env.r, eps);

  const SampledPath W = weight_function(field, g);
  const std::size_t i0 = static_cast<std::size_t>(ir - tp);
  std::vector<double> pv(static_cast<std::size_t>(k) + 1), wv(pv.size());
  for (std::size_t s = 0; s < pv.size(); ++s) {
    pv[s] = (g.path.values[i0 + s] - env.x_eps) / e2;
    wv[s] = (W.values[i0 + s] - W.values[i0]) / eps;
  }
  env.pi = SampledPath(0.0, 1.0 / k, std::move(pv));
  env.W = SampledPath(0.0, 1.0 / k, std::move(wv));
  return env;
}

OverlapResult overlap(const Geodesic& g1, const Geodesic& g2) {
  if (g1.field_id != g2.field_id) {
    throw std::invalid_argument("overlap: geodesics come from different fields");
  }
  OverlapResult out;
  const int lo = std::max(g1.line_lo, g2.line_lo);
  const int hi = std::min(g1.line_hi, g2.line_hi);
  for (int j = lo; j <= hi; ++j) {
    const auto k1 = static_cast<std::size_t>(j - g1.line_lo);
    const auto k2 = static_cast<std::size_t>(j - g2.line_lo);
    if (g1.breakpoints[k1] == g2.breakpoints[k2] &&
        g1.breakpoints[k1 + 1] == g2.breakpoints[k2 + 1]) {
      out.lines.push_back(j);
    }
  }
  for (std::size_t i = 1; i < out.lines.size(); ++i) {
    if (out.lines[i] != out.lines[i - 1] + 1) out.contiguous = false;
  }
  return out;
}

double holder_statistic(const SampledPath& f, double exponent, double log_power,
                        std::size_t exhaustive_limit) {
  const std::size_t m = f.size();
  if (m < 2) throw std::invalid_argument("holder_statistic: need at least 2 points");
  if (!(exponent > 0.0)) throw std::invalid_argument("holder_statistic: exponent must be > 0");
  if (f.dt * static_cast<double>(m - 1) >= 2.0 && log_power != 0.0) {
    throw std::invalid_argument("holder_statistic: log correction needs span < 2");
  }
  const auto& v = f.values;
  const auto [mn, mx] = std::minmax_element(v.begin(), v.end());
  const double osc = *mx - *mn;
  const bool prune = m > exhaustive_limit;
  double best = 0.0;
  for (std::size_t h = 1; h < m; ++h) {
    const double span = static_cast<double>(h) * f.dt;
    double denom = std::pow(span, exponent);
    if (log_power != 0.0) denom *= std::pow(std::log(2.0 / span), log_power);
    if (prune && osc / denom <= best) continue;
    double local = 0.0;
    for (std::size_t i = 0; i + h < m; ++i) {
      local = std::max(local, std::abs(v[i + h] - v[i]));
    }
    best = std::max(best, local / denom);
  }
  return best;
}

}  // namespace kpzlab
