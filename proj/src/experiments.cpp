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

#include "kpzlab/experiments.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <map>
#include <mutex>
#include <stdexcept>
#include <string>
#include <tuple>

#include "kpzlab/parallel.hpp"
#include "kpzlab/processes.hpp"

namespace kpzlab {

namespace {

constexpr double kIdentityTol = 1e-9;
constexpr std::uint64_t kReferenceTag = 1ULL << 62;
constexpr std::uint64_t kBootstrapTag = (1ULL << 62) + 1;

bool close(double a, double b) {
  if (a == kBottom || b == kBottom) return a == b;
  return std::abs(a - b) <= kIdentityTol * std::max(1.0, std::abs(a));
}

void check_samples(std::size_t n_samples) {
  if (n_samples < 2) throw std::invalid_argument("need at least 2 replicas");
}

int check_eps_lines(int eps_lines, int n) {
  if (eps_lines < 1) {
    throw std::invalid_argument("eps^3 must be at least one line spacing");
  }
  if (eps_lines > n) throw std::invalid_argument("eps^3 exceeds the unit time interval");
  return eps_lines;
}

// Passage values over consecutive pieces of `lines` lines sum to the total.
bool partition_adds_up(const GeodesicSample& g, int lines) {
  const LppField& f = g.field;
  const int n = f.n();
  double sum = 0.0;
  for (int t = 0; t < n; t += lines) {
    const int t2 = std::min(n, t + lines);
    const std::size_t xi = f.x_index(g.geodesic.path.values[static_cast<std::size_t>(t)]);
    const std::size_t yi = f.x_index(g.geodesic.path.values[static_cast<std::size_t>(t2)]);
    sum += landscape_at(f, xi, t, yi, t2);
  }
  return close(sum, g.geodesic.value);
}

struct Increment {
  double I = 0.0;
  double W = 0.0;
};

Increment increment_at(const GeodesicSample& g, int ts, int lines, double eps) {
  const auto& pv = g.geodesic.path.values;
  const auto& wv = g.weight.values;
  const auto a = static_cast<std::size_t>(ts);
  const auto b = static_cast<std::size_t>(ts + lines);
  return {(pv[a] - pv[b]) / (eps * eps), (wv[b] - wv[a]) / eps};
}

// Every `step`-th value of p.
SampledPath coarsen(const SampledPath& p, std::size_t step) {
  std::vector<double> v;
  for (std::size_t k = 0; k < p.size(); k += step) v.push_back(p.values[k]);
  return SampledPath(p.t0, p.dt * static_cast<double>(step), std::move(v));
}

}  // namespace

double LatticeParams::delta() const {
  if (grid_step > 0.0) return grid_step;
  return LppScaling::for_lines(n).delta_for_cells(cells_per_shift);
}

double LatticeParams::grid_half_window() const {
  const double d = delta();
  return std::max(1.0, std::round(half_window / d)) * d;
}

void LatticeParams::validate() const {
  if (n < 2) throw std::invalid_argument("n_lines must be at least 2");
  if (cells_per_shift < 1) throw std::invalid_argument("cells_per_shift must be >= 1");
  if (!(half_window > 0.0)) throw std::invalid_argument("window must be > 0");
  if (grid_step < 0.0 || !std::isfinite(grid_step)) {
    throw std::invalid_argument("grid step must be > 0");
  }
  if (calibrate && calibration_samples < 2) {
    throw std::invalid_argument("calibration needs at least 2 samples");
  }
}

LppScaling calibrated_scaling(int n, double delta, int samples, std::uint64_t seed) {
  using Key = std::tuple<int, double, int, std::uint64_t>;
  static std::mutex mu;
  static std::map<Key, LppScaling> cache;
  const Key key{n, delta, samples, seed};
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(key);
  if (it == cache.end()) {
    it = cache.emplace(key, calibrate_scaling(n, delta, samples, seed).scaling).first;
  }
  return it->second;
}

LppScaling lattice_scaling(const LatticeParams& p) {
  p.validate();
  if (!p.calibrate) return LppScaling::for_lines(p.n);
  return calibrated_scaling(p.n, p.delta(), p.calibration_samples, p.calibration_seed);
}

LimitParams limit_params(const LatticeParams& p, double M) {
  p.validate();
  LimitParams lp = LimitParams::for_lines(p.n, p.cells_per_shift);
  if (p.grid_step > 0.0) lp.delta = p.grid_step;
  lp.M = M;
  if (p.calibrate) {
    lp.scaling = calibrated_scaling(p.n, lp.delta, p.calibration_samples, p.calibration_seed);
  }
  return lp;
}

GeodesicSample geodesic_sample(const Rng& base, std::size_t replica,
                               const LppScaling& scaling, const LatticeParams& params) {
  Rng rng = base.split(replica).split(1);
  const double h = params.grid_half_window();
  LppField field = build_field(rng, scaling, -h, h, params.delta());
  Geodesic g = landscape_geodesic(field, {0.0, 0.0, 0.0, 1.0});
  SampledPath w = weight_function(field, g);
  bool edge = false;
  const double tol = 0.5 * field.delta();
  for (double x : g.path.values) {
    if (x <= field.x_min() + tol || x >= field.x_max() - tol) edge = true;
  }
  return {std::move(field), std::move(g), std::move(w), edge};
}

int grid_time(double t, int n) {
  const double k = t * n;
  const double kr = std::round(k);
  if (std::abs(k - kr) > 1e-9 * std::max(1.0, k) || kr < 0 || kr > n) {
    throw std::invalid_argument("time " + std::to_string(t) + " is not on the " +
                                std::to_string(n) + "-line grid");
  }
  return static_cast<int>(kr);
}

IncrementSamples increment_samples(const Rng& base, const LatticeParams& params, double s,
                                   int eps_lines, std::size_t n_samples, int workers) {
  check_samples(n_samples);
  const int n = params.n;
  check_eps_lines(eps_lines, n);
  const int ts = grid_time(s, n);
  if (ts + eps_lines > n) throw std::invalid_argument("s + eps^3 exceeds 1");
  const int half = grid_time(0.5, n);
  const LppScaling sc = lattice_scaling(params);
  const double eps = eps_for_lines(eps_lines, n);

  struct Out {
    Increment inc;
    double transversal;
    bool partition_ok;
    bool edge;
  };
  const auto reps = parallel_map(n_samples, workers, [&](std::size_t r) {
    const GeodesicSample g = geodesic_sample(base, r, sc, params);
    return Out{increment_at(g, ts, eps_lines, eps),
               g.geodesic.path.values[static_cast<std::size_t>(half)],
               partition_adds_up(g, eps_lines), g.touches_edge};
  });
  IncrementSamples out;
  out.s = s;
  out.eps_lines = eps_lines;
  out.eps = eps;
  for (const auto& o : reps) {
    out.I.push_back(o.inc.I);
    out.W.push_back(o.inc.W);
    out.transversal.push_back(o.transversal);
    if (!o.partition_ok) ++out.partition_failures;
    if (o.edge) ++out.edge_contacts;
  }
  return out;
}

const char* target_name(VariationTarget t) {
  return t == VariationTarget::kPath ? "pi" : "weight";
}

double critical_alpha(VariationTarget t) {
  return t == VariationTarget::kPath ? 1.5 : 3.0;
}

bool VariationRow::linear() const {
  const double diff = std::abs(half.mean - 0.5 * full.mean);
  const double se = std::sqrt(half.std_error * half.std_error +
                              0.25 * full.std_error * full.std_error);
  return diff <= 1.959963984540054 * se;
}

VariationResult variation_sweep(const Rng& base, const LatticeParams& params,
                                const VariationSpec& spec, std::size_t n_samples,
                                int workers) {
  check_samples(n_samples);
  if (spec.series.empty()) throw std::invalid_argument("variation: no alphas");
  if (spec.eps_lines.empty()) throw std::invalid_argument("variation: empty eps list");
  const int n = params.n;
  const int ta = grid_time(spec.a, n);
  const int tb = grid_time(spec.b, n);
  if (tb <= ta || (tb - ta) % 2 != 0) {
    throw std::invalid_argument("variation: interval must span an even number of lines");
  }
  const int tm = (ta + tb) / 2;
  for (int k : spec.eps_lines) {
    check_eps_lines(k, n);
    if (k > tm - ta) throw std::invalid_argument("variation: eps longer than half interval");
  }
  for (const auto& s : spec.series) {
    if (!(s.alpha > 0.0)) throw std::invalid_argument("variation: alpha must be > 0");
  }
  const LppScaling sc = lattice_scaling(params);
  const std::size_t ns = spec.series.size(), ne = spec.eps_lines.size();

  struct Out {
    std::vector<double> full, half;  // [series][eps]
    bool edge;
  };
  const auto reps = parallel_map(n_samples, workers, [&](std::size_t r) {
    const GeodesicSample g = geodesic_sample(base, r, sc, params);
    const double a = static_cast<double>(ta) / n, b = static_cast<double>(tb) / n,
                 m = static_cast<double>(tm) / n;
    const SampledPath paths[2] = {g.geodesic.path, g.weight};
    SampledPath full[2] = {paths[0].restrict(a, b), paths[1].restrict(a, b)};
    SampledPath half[2] = {paths[0].restrict(a, m), paths[1].restrict(a, m)};
    Out o{std::vector<double>(ns * ne), std::vector<double>(ns * ne), g.touches_edge};
    for (std::size_t i = 0; i < ns; ++i) {
      const auto t = static_cast<std::size_t>(spec.series[i].target);
      for (std::size_t e = 0; e < ne; ++e) {
        const double eps = static_cast<double>(spec.eps_lines[e]) / n;
        o.full[i * ne + e] = variation(full[t], spec.series[i].alpha, eps);
        o.half[i * ne + e] = variation(half[t], spec.series[i].alpha, eps);
      }
    }
    return o;
  });

  VariationResult out;
  out.n_samples = n_samples;
  for (const auto& o : reps) out.edge_contacts += o.edge ? 1 : 0;
  for (std::size_t i = 0; i < ns; ++i) {
    std::vector<double> log_eps, log_v;
    for (std::size_t e = 0; e < ne; ++e) {
      MomentAccumulator full(1.0), half(1.0);
      for (const auto& o : reps) {
        full.add(o.full[i * ne + e]);
        half.add(o.half[i * ne + e]);
      }
      VariationRow row;
      row.series = spec.series[i];
      row.eps_lines = spec.eps_lines[e];
      row.eps = static_cast<double>(row.eps_lines) / n;
      row.full = full.estimate();
      row.half = half.estimate();
      if (row.full.mean > 0.0) {
        log_eps.push_back(std::log(row.eps));
        log_v.push_back(std::log(row.full.mean));
      }
      out.rows.push_back(row);
    }
    VariationSlope slope;
    slope.series = spec.series[i];
    if (log_eps.size() >= 2) slope.fit = linear_fit(log_eps, log_v);
    out.slopes.push_back(slope);
  }
  return out;
}

IndependenceResult independence_experiment(const Rng& base, const LatticeParams& params,
                                           double t1, double t2, int eps_lines,
                                           std::size_t n_samples, int workers,
                                           int resamples) {
  check_samples(n_samples);
  const int n = params.n;
  check_eps_lines(eps_lines, n);
  const int i1 = grid_time(t1, n), i2 = grid_time(t2, n);
  if (i1 <= 0 || i1 + eps_lines >= i2 || i2 + eps_lines >= n) {
    throw std::invalid_argument("independence: need 0 < t1 < t1 + eps^3 < t2 < t2 + eps^3 < 1");
  }
  const LppScaling sc = lattice_scaling(params);
  const double eps = eps_for_lines(eps_lines, n);
  const auto reps = parallel_map(n_samples, workers, [&](std::size_t r) {
    const GeodesicSample g = geodesic_sample(base, r, sc, params);
    return std::pair<double, double>{std::abs(increment_at(g, i1, eps_lines, eps).I),
                                     std::abs(increment_at(g, i2, eps_lines, eps).I)};
  });
  std::vector<double> x, y;
  for (const auto& [a, b] : reps) {
    x.push_back(a);
    y.push_back(b);
  }
  Rng boot = base.split(kBootstrapTag);
  IndependenceResult out;
  out.t1 = t1;
  out.t2 = t2;
  out.eps_lines = eps_lines;
  out.eps = eps;
  out.n_samples = n_samples;
  out.corr = bootstrap_correlation(x, y, resamples, boot);
  return out;
}

EnvironmentResult environment_experiment(const Rng& base, const LatticeParams& params,
                                         double r, const std::vector<int>& eps_lines,
                                         const std::vector<double>& probes,
                                         std::size_t n_samples, int workers) {
  check_samples(n_samples);
  if (eps_lines.empty() || probes.empty()) {
    throw std::invalid_argument("environment: empty eps or probe list");
  }
  const int n = params.n;
  const int ir = grid_time(r, n);
  for (int k : eps_lines) {
    check_eps_lines(k, n);
    if (ir <= 0 || ir + k >= n) {
      throw std::invalid_argument("environment: [r, r + eps^3] must be interior");
    }
    // probe z sits eps^2 z from X; keep it well inside the window
    const double e2 = std::pow(eps_for_lines(k, n), 2.0);
    for (double z : probes) {
      if (std::abs(z) * e2 > 0.5 * params.half_window) {
        throw std::invalid_argument("environment: probe " + std::to_string(z) +
                                    " falls outside the rescaled window");
      }
    }
  }
  const LppScaling sc = lattice_scaling(params);
  const std::size_t ne = eps_lines.size(), np = probes.size();

  struct Out {
    std::vector<double> bessel, brownian;  // [eps][probe]
    std::vector<char> sign_ok;             // [eps]
  };
  const auto reps = parallel_map(n_samples, workers, [&](std::size_t rep) {
    const GeodesicSample g = geodesic_sample(base, rep, sc, params);
    Out o{std::vector<double>(ne * np), std::vector<double>(ne * np),
          std::vector<char>(ne, 1)};
    for (std::size_t e = 0; e < ne; ++e) {
      const auto env = rescale_environment(g.field, g.geodesic, r,
                                           eps_for_lines(eps_lines[e], n));
      // F and G share the z-grid; index 0 of each sits at its own t0.
      const auto f0 = static_cast<long>(std::lround(-env.F.t0 / env.F.dt));
      const auto g0 = static_cast<long>(std::lround(-env.G.t0 / env.G.dt));
      const long lo = -std::min(f0, g0);
      const long hi = std::min(static_cast<long>(env.F.size()) - 1 - f0,
                               static_cast<long>(env.G.size()) - 1 - g0);
      for (long k = lo; k <= hi; ++k) {
        if (env.F.values[static_cast<std::size_t>(k + f0)] +
                env.G.values[static_cast<std::size_t>(k + g0)] > kIdentityTol) {
          o.sign_ok[e] = 0;
        }
      }
      for (std::size_t p = 0; p < np; ++p) {
        const double z = probes[p];
        if (z < std::max(env.F.t0, env.G.t0) ||
            z > std::min(env.F.time(env.F.size() - 1), env.G.time(env.G.size() - 1))) {
          // staircases only move right; small n leaves a narrow reachable cone
          throw std::invalid_argument("environment: probe " + std::to_string(z) +
                                      " is not reachable from both geodesic ends (replica " +
                                      std::to_string(rep) + ")");
        }
        const double f = env.F.at(z), gz = env.G.at(z);
        o.bessel[e * np + p] = -(f + gz) / 2.0;
        o.brownian[e * np + p] = (f - gz) / 2.0;
      }
    }
    return o;
  });

  // Direct samplers for R(z) and B(z), diffusion 1.
  std::vector<std::vector<double>> ref_r(np), ref_b(np);
  const Rng ref = base.split(kReferenceTag);
  for (std::size_t p = 0; p < np; ++p) {
    const double z = std::abs(probes[p]);
    for (std::size_t i = 0; i < n_samples; ++i) {
      if (z == 0.0) {
        ref_r[p].push_back(0.0);
        ref_b[p].push_back(0.0);
        continue;
      }
      Rng rr = ref.split(2 * p).split(i), rb = ref.split(2 * p + 1).split(i);
      ref_r[p].push_back(sample_bessel3(rr, 0.0, z, 2).values[1]);
      ref_b[p].push_back(sample_brownian(rb, 0.0, z, 2).values[1]);
    }
  }

  EnvironmentResult out;
  out.r = static_cast<double>(ir) / n;
  out.n_samples = n_samples;
  for (std::size_t e = 0; e < ne; ++e) {
    EnvironmentScale sc_out;
    sc_out.eps_lines = eps_lines[e];
    sc_out.eps = eps_for_lines(eps_lines[e], n);
    for (const auto& o : reps) sc_out.sign_violations += o.sign_ok[e] ? 0 : 1;
    for (std::size_t p = 0; p < np; ++p) {
      std::vector<double> bes, bro;
      for (const auto& o : reps) {
        bes.push_back(o.bessel[e * np + p]);
        bro.push_back(o.brownian[e * np + p]);
      }
      sc_out.probes.push_back({probes[p], two_sample_distance(bes, ref_r[p]),
                               two_sample_distance(bro, ref_b[p])});
    }
    out.scales.push_back(std::move(sc_out));
  }
  return out;
}

HolderResult holder_experiment(const Rng& base, const LatticeParams& params,
                               const std::vector<int>& resolutions, std::size_t n_samples,
                               int workers) {
  check_samples(n_samples);
  const int n = params.n;
  if (resolutions.empty()) throw std::invalid_argument("holder: no resolutions");
  for (std::size_t i = 0; i < resolutions.size(); ++i) {
    const int k = resolutions[i];
    if (k < 2 || n % k != 0) {
      throw std::invalid_argument("holder: resolution " + std::to_string(k) +
                                  " must divide n_lines");
    }
    if (i > 0 && (k <= resolutions[i - 1] || k % resolutions[i - 1] != 0)) {
      throw std::invalid_argument("holder: resolutions must be increasing and nested");
    }
  }
  const LppScaling sc = lattice_scaling(params);
  const std::size_t nr = resolutions.size();
  struct Out {
    std::vector<double> stats;  // [resolution][4]
  };
  const auto reps = parallel_map(n_samples, workers, [&](std::size_t r) {
    const GeodesicSample g = geodesic_sample(base, r, sc, params);
    Out o{std::vector<double>(4 * nr)};
    for (std::size_t i = 0; i < nr; ++i) {
      const auto step = static_cast<std::size_t>(n / resolutions[i]);
      const SampledPath p = coarsen(g.geodesic.path, step);
      const SampledPath w = coarsen(g.weight, step);
      o.stats[4 * i + 0] = holder_statistic(p, 2.0 / 3.0, 0.0);
      o.stats[4 * i + 1] = holder_statistic(w, 1.0 / 3.0, 0.0);
      o.stats[4 * i + 2] = holder_statistic(p, 2.0 / 3.0, 1.0 / 3.0);
      o.stats[4 * i + 3] = holder_statistic(w, 1.0 / 3.0, 2.0 / 3.0);
    }
    return o;
  });
  HolderResult out;
  out.n_samples = n_samples;
  for (const auto& o : reps) {
    bool ok = true;
    for (std::size_t i = 1; i < nr; ++i) {
      for (std::size_t q = 0; q < 4; ++q) {
        if (o.stats[4 * i + q] < o.stats[4 * (i - 1) + q]) ok = false;
      }
    }
    if (!ok) ++out.monotonicity_violations;
  }
  for (std::size_t i = 0; i < nr; ++i) {
    double med[4];
    for (std::size_t q = 0; q < 4; ++q) {
      std::vector<double> v;
      for (const auto& o : reps) v.push_back(o.stats[4 * i + q]);
      med[q] = median(v);
    }
    out.rows.push_back({resolutions[i], med[0], med[1], med[2], med[3]});
  }
  return out;
}

std::vector<InvarianceCheck> invariance_experiment(const Rng& base,
                                                   const LatticeParams& params,
                                                   std::size_t n_samples, int workers) {
  check_samples(n_samples);
  const int n = params.n;
  const int th = grid_time(0.5, n);
  if (params.half_window < 1.0) {
    throw std::invalid_argument("invariance: window must contain [-1, 1]");
  }
  const LppScaling sc = lattice_scaling(params);
  const double delta = params.delta();
  const double h = params.grid_half_window();
  const auto reps = parallel_map(n_samples, workers, [&](std::size_t r) {
    Rng ra = base.split(r).split(1), rb = base.split(r).split(2);
    const LppField fa = build_field(ra, sc, -h, h, delta);
    const LppField fb = build_field(rb, sc, -h, h, delta);
    const auto a1 = landscape_profile_from(fa, fa.x_index(0.0), 0, n);
    const auto b1 = landscape_profile_from(fb, fb.x_index(0.0), 0, n);
    const auto bh = landscape_profile_from(fb, fb.x_index(0.0), 0, th);
    const double b_shift = landscape_at(fb, fb.x_index(-0.5), 0, fb.x_index(0.0), n);
    return std::array<double, 6>{a1[fa.x_index(0.0)], std::cbrt(2.0) * bh[fb.x_index(0.0)],
                                 a1[fa.x_index(0.5)], b_shift,
                                 a1[fa.x_index(0.5)], b1[fb.x_index(-0.5)]};
  });
  const char* names[3] = {"scaling", "translation", "reflection"};
  std::vector<InvarianceCheck> out;
  for (std::size_t c = 0; c < 3; ++c) {
    std::vector<double> a, b;
    for (const auto& v : reps) {
      a.push_back(v[2 * c]);
      b.push_back(v[2 * c + 1]);
    }
    out.push_back({names[c], two_sample_distance(a, b), mean(a), mean(b)});
  }
  return out;
}

double brute_force_passage(const LppField& f, GridPoint start, GridPoint end,
                           std::vector<std::size_t>* best_bps) {
  const int lines = end.line - start.line + 1;
  if (lines < 1) throw std::invalid_argument("brute_force_passage: end before start");
  std::vector<std::size_t> bps(static_cast<std::size_t>(lines) + 1);
  bps.front() = start.pos;
  bps.back() = end.pos;
  double best = kBottom;
  // k: next free boundary; boundary k sits at time start.line - 1 + k.
  std::function<void(int, double)> rec = [&](int k, double acc) {
    const int j = start.line + k - 1;
    const auto add = [&](std::size_t a, std::size_t b) {
      double s = 0.0;
      for (std::size_t c = a; c < b; ++c) s += f.increment(j, c);
      return s;
    };
    const auto ku = static_cast<std::size_t>(k);
    if (k == lines) {
      if (bps[ku - 1] > end.pos) return;
      const double v = acc + add(bps[ku - 1], end.pos);
      if (v > best) {
        best = v;
        if (best_bps) *best_bps = bps;
      }
      return;
    }
    const int t = start.line - 1 + k;
    const std::size_t lo = std::max(bps[ku - 1], f.shift(t));
    const std::size_t hi = std::min(end.pos, f.shift(t) + f.window_cells());
    for (std::size_t b = lo; b <= hi; ++b) {
      bps[ku] = b;
      rec(k + 1, acc + add(bps[ku - 1], b));
    }
  };
  rec(1, 0.0);
  return best;
}

SelftestResult run_selftest(const Rng& base, std::size_t instances, std::size_t triples) {
  SelftestResult out;
  const auto note = [&](double a, double b) {
    if (a != kBottom && b != kBottom) out.max_error = std::max(out.max_error, std::abs(a - b));
    return close(a, b);
  };

  // Exhaustive enumeration on fields of at most 4 lines and 8 cells, half of
  // them sheared by 1.5 cells per line.
  for (std::uint64_t rep = 0; out.oracle_instances < instances; ++rep) {
    Rng rng = base.split(1).split(rep);
    const int n = 1 + static_cast<int>(rng.next_u64() % 4);
    const std::size_t cells = 1 + rng.next_u64() % 8;
    const LppScaling s = LppScaling::for_lines(n);
    const double delta = s.shift_per_line / (rep % 2 == 0 ? 0.01 : 1.5);
    const LppField f = build_field(rng, s, 0.0, static_cast<double>(cells) * delta, delta);
    const int l0 = 1 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n));
    const int l1 = l0 + static_cast<int>(rng.next_u64() % static_cast<std::uint64_t>(n - l0 + 1));
    const std::size_t s0 = f.shift(l0 - 1) + rng.next_u64() % (cells + 1);
    const std::size_t e_lo = std::max(s0, f.shift(l1));
    const std::size_t e_hi = f.shift(l1) + cells;
    if (e_lo > e_hi) continue;
    const std::size_t e0 = e_lo + rng.next_u64() % (e_hi - e_lo + 1);
    const double bf = brute_force_passage(f, {s0, l0}, {e0, l1});
    const double dp = raw_last_passage(f, {s0, l0}, {e0, l1});
    const Geodesic g = extract_geodesic(f, {s0, l0}, {e0, l1});
    bool ok = note(dp, bf) && note(g.raw_value, bf);
    const auto prof = passage_profile(f, {s0, l0}, l1);
    for (std::size_t u = e_lo; u <= e_hi; ++u) {
      ok = note(prof[u], brute_force_passage(f, {s0, l0}, {u, l1})) && ok;
    }
    ++out.oracle_instances;
    if (!ok) ++out.oracle_failures;
  }

  // Composition and triangle inequality on a 16-line field.
  Rng frng = base.split(2);
  const LppField f = build_field(frng, 16, -1.0, 1.0, 1.0 / 32);
  const std::size_t m = f.window_cells();
  Rng trng = base.split(3);
  for (; out.triples < triples; ++out.triples) {
    const int ti = static_cast<int>(trng.next_u64() % 14);
    const int tk = ti + 1 + static_cast<int>(trng.next_u64() % static_cast<std::uint64_t>(14 - ti));
    const int tj = tk + 1 + static_cast<int>(trng.next_u64() % static_cast<std::uint64_t>(16 - tk));
    const std::size_t xi = trng.next_u64() % (m + 1);
    const std::size_t yi = trng.next_u64() % (m + 1);
    const std::size_t zi = trng.next_u64() % (m + 1);
    const double whole = landscape_at(f, xi, ti, yi, tj);
    const double split = landscape_at(f, xi, ti, zi, tk) + landscape_at(f, zi, tk, yi, tj);
    if (!(split == kBottom || whole >= split - kIdentityTol * std::max(1.0, std::abs(whole)))) {
      ++out.triangle_failures;
    }
    const auto a = landscape_profile_from(f, xi, ti, tk);
    const auto b = landscape_profile_to(f, yi, tj, tk);
    double best = kBottom;
    for (std::size_t z = 0; z <= m; ++z) best = std::max(best, a[z] + b[z]);
    if (!note(whole, best)) ++out.composition_failures;
  }

  // Weight additivity: passage values over any partition of a geodesic add up.
  for (std::uint64_t rep = 0; rep < 20; ++rep) {
    Rng rng = base.split(4).split(rep);
    const LppField wf = build_field(rng, 64, -1.5, 1.5, 1.0 / 64);
    const auto g = landscape_geodesic(wf, {0.0, 0.0, 0.0, 1.0});
    const auto w = weight_function(wf, g);
    for (int step : {1, 3, 8, 64}) {
      double sum = 0.0;
      bool ok = true;
      for (int t = 0; t < 64; t += step) {
        const int t2 = std::min(64, t + step);
        const std::size_t xi = wf.x_index(g.path.values[static_cast<std::size_t>(t)]);
        const std::size_t yi = wf.x_index(g.path.values[static_cast<std::size_t>(t2)]);
        const double piece = landscape_at(wf, xi, t, yi, t2);
        ok = note(w.values[static_cast<std::size_t>(t2)] - w.values[static_cast<std::size_t>(t)],
                  piece) && ok;
        sum += piece;
      }
      ok = note(sum, g.value) && ok;
      ++out.weight_paths;
      if (!ok) ++out.weight_failures;
    }
  }
  return out;
}

}  // namespace kpzlab
