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

#include "cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "kpzlab/experiments.hpp"
#include "kpzlab/limit_environment.hpp"
#include "kpzlab/processes.hpp"
#include "kpzlab/stats.hpp"

namespace kpzlab::cli {

namespace {

using json = nlohmann::ordered_json;

// Raised for bad configuration or unwritable outputs (exit code 2).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

template <class T>
std::vector<T> parse_list(const std::string& text, const char* what) {
  std::vector<T> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      double v = std::stod(item, &used);
      if (used != item.size()) throw std::invalid_argument(item);
      if constexpr (std::is_integral_v<T>) {
        if (v != std::floor(v)) throw std::invalid_argument(item);
      }
      out.push_back(static_cast<T>(v));
    } catch (const std::exception&) {
      throw ConfigError(std::string("bad value '") + item + "' in --" + what);
    }
  }
  if (out.empty()) throw ConfigError(std::string("--") + what + " is empty");
  return out;
}

// Raw command-line values; unset optionals take per-subcommand defaults.
struct Flags {
  std::uint64_t seed = 1;
  std::optional<int> n_lines;
  std::optional<double> delta;
  std::optional<double> window;
  std::optional<std::string> eps_lines;
  std::optional<std::string> alphas;
  std::optional<std::size_t> n_samples;
  std::string out_dir = "out";
  int workers = 1;
  std::string target = "pi";
  std::optional<std::string> band;
  std::optional<std::string> times;
  std::optional<std::string> probes;
  std::optional<std::string> resolutions;
  std::optional<double> s;
  std::optional<double> r;
  int cells_per_shift = 4;
  int calibration_samples = 2000;
  std::size_t paths = 3;
};

struct Criterion {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct Run {
  std::string sub;
  Flags flags;
  json config;  // effective configuration, echoed into every output
  json results = json::object();
  std::vector<Criterion> criteria;
  std::vector<std::string> files;

  std::filesystem::path file(const std::string& stem, const char* ext = ".csv") const {
    return std::filesystem::path(flags.out_dir) / (stem + "-" + std::to_string(flags.seed) + ext);
  }
  void check(std::string name, bool passed, std::string detail) {
    criteria.push_back({std::move(name), passed, std::move(detail)});
  }
};

class Csv {
 public:
  Csv(Run& run, const std::string& stem, const std::vector<std::string>& columns) {
    const auto path = run.file(stem);
    os_.open(path);
    if (!os_) throw ConfigError("cannot write " + path.string());
    run.files.push_back(path.string());
    os_ << "# kpzlab " << kVersion << " " << run.sub << "\n";
    os_ << "# config " << run.config.dump() << "\n";
    for (std::size_t i = 0; i < columns.size(); ++i) os_ << (i ? "," : "") << columns[i];
    os_ << "\n";
  }
  template <class... T>
  void row(const T&... cells) {
    std::size_t i = 0;
    ((os_ << (i++ ? "," : "") << cell(cells)), ...);
    os_ << "\n";
  }
  ~Csv() {
    os_.flush();
  }

 private:
  static std::string cell(const std::string& s) { return s; }
  static std::string cell(const char* s) { return s; }
  static std::string cell(double v) { return num(v); }
  static std::string cell(std::size_t v) { return std::to_string(v); }
  static std::string cell(int v) { return std::to_string(v); }
  std::ofstream os_;
};

LatticeParams lattice(const Flags& f, int default_n) {
  LatticeParams p;
  p.n = f.n_lines.value_or(default_n);
  p.cells_per_shift = f.cells_per_shift;
  p.half_window = f.window.value_or(1.5);
  p.calibration_samples = f.calibration_samples;
  p.grid_step = f.delta.value_or(0.0);
  try {
    p.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

void echo_lattice(Run& run, const LatticeParams& p, std::size_t n_samples) {
  run.config["n_lines"] = p.n;
  run.config["delta"] = p.delta();
  run.config["cells_per_shift"] = p.cells_per_shift;
  run.config["window"] = p.grid_half_window();
  run.config["calibration_samples"] = p.calibration_samples;
  run.config["calibration_seed"] = p.calibration_seed;
  run.config["n_samples"] = n_samples;
}

std::size_t samples(const Flags& f, std::size_t dflt) {
  const std::size_t n = f.n_samples.value_or(dflt);
  if (n < 2) throw ConfigError("--n-samples must be at least 2");
  return n;
}

Rng base_rng(const Run& run) { return Rng(run.flags.seed, 0); }

// ---------------------------------------------------------------- selftest

void run_selftest_cmd(Run& run) {
  const std::size_t instances = run.flags.n_samples.value_or(200);
  run.config["instances"] = instances;
  run.config["triples"] = 2000;
  const auto r = run_selftest(base_rng(run), instances, 2000);
  Csv csv(run, "selftest", {"check", "cases", "failures", "max_error"});
  csv.row("oracle", r.oracle_instances, r.oracle_failures, r.max_error);
  csv.row("composition", r.triples, r.composition_failures, r.max_error);
  csv.row("triangle", r.triples, r.triangle_failures, r.max_error);
  csv.row("weight_additivity", r.weight_paths, r.weight_failures, r.max_error);
  run.results = {{"oracle_instances", r.oracle_instances},
                 {"oracle_failures", r.oracle_failures},
                 {"triples", r.triples},
                 {"composition_failures", r.composition_failures},
                 {"triangle_failures", r.triangle_failures},
                 {"weight_paths", r.weight_paths},
                 {"weight_failures", r.weight_failures},
                 {"max_error", r.max_error}};
  run.check("oracle_equivalence", r.oracle_failures == 0 && r.oracle_instances >= 100,
            std::to_string(r.oracle_failures) + " of " + std::to_string(r.oracle_instances));
  run.check("composition", r.composition_failures == 0 && r.triples >= 1000,
            std::to_string(r.composition_failures) + " of " + std::to_string(r.triples));
  run.check("triangle", r.triangle_failures == 0,
            std::to_string(r.triangle_failures) + " of " + std::to_string(r.triples));
  run.check("weight_additivity", r.weight_failures == 0,
            std::to_string(r.weight_failures) + " of " + std::to_string(r.weight_paths));
}

// --------------------------------------------------------------- variation

void write_paths(Run& run, const LatticeParams& p, std::size_t count) {
  if (count == 0) return;
  const LppScaling sc = lattice_scaling(p);
  const Rng base = base_rng(run);
  Csv pi(run, "paths-pi", {"t", "value", "replica"});
  Csv w(run, "paths-weight", {"t", "value", "replica"});
  Csv br(run, "paths-bridge", {"t", "value", "replica"});
  for (std::size_t i = 0; i < count; ++i) {
    const auto g = geodesic_sample(base, i, sc, p);
    for (std::size_t k = 0; k < g.geodesic.path.size(); ++k) {
      pi.row(g.geodesic.path.time(k), g.geodesic.path.values[k], i);
      w.row(g.weight.time(k), g.weight.values[k], i);
    }
    Rng rng = base.split(1ULL << 61).split(i);
    const auto b = sample_brownian_bridge(rng, 1.0 / p.n, static_cast<std::size_t>(p.n), 1.0);
    for (std::size_t k = 0; k < b.size(); ++k) br.row(b.time(k), b.values[k], i);
  }
}

void run_variation(Run& run) {
  const Flags& f = run.flags;
  const LatticeParams p = lattice(f, 512);
  const std::size_t N = samples(f, 1000);
  echo_lattice(run, p, N);
  std::vector<VariationTarget> targets;
  if (f.target == "pi") {
    targets = {VariationTarget::kPath};
  } else if (f.target == "weight") {
    targets = {VariationTarget::kWeight};
  } else if (f.target == "both") {
    targets = {VariationTarget::kPath, VariationTarget::kWeight};
    if (f.alphas) throw ConfigError("--alphas needs a single --target (pi or weight)");
  } else {
    throw ConfigError("--target must be pi, weight or both");
  }
  VariationSpec spec;
  spec.eps_lines = parse_list<int>(f.eps_lines.value_or("4,8,16,32"), "eps-lines");
  for (auto t : targets) {
    const double c = critical_alpha(t);
    const auto alphas = f.alphas ? parse_list<double>(*f.alphas, "alphas")
                                 : std::vector<double>{c * 2.0 / 3.0, c, c * 4.0 / 3.0};
    for (double a : alphas) spec.series.push_back({t, a});
  }
  run.config["target"] = f.target;
  run.config["eps_lines"] = spec.eps_lines;
  json alphas = json::array();
  for (const auto& s : spec.series) alphas.push_back({{"target", target_name(s.target)}, {"alpha", s.alpha}});
  run.config["series"] = alphas;
  run.config["interval"] = {spec.a, spec.b};
  run.config["paths"] = f.paths;

  VariationResult res;
  try {
    res = variation_sweep(base_rng(run), p, spec, N, f.workers);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }

  for (std::size_t ti = 0; ti < targets.size(); ++ti) {
    const auto t = targets[ti];
    const std::string stem = ti == 0 ? "variation" : std::string("variation-") + target_name(t);
    Csv csv(run, stem, {"alpha", "eps", "mean_V", "se_V", "n"});
    for (const auto& r : res.rows) {
      if (r.series.target == t) csv.row(r.series.alpha, r.eps, r.full.mean, r.full.std_error, r.full.n_samples);
    }
  }
  json rows = json::array();
  for (const auto& r : res.rows) {
    rows.push_back({{"target", target_name(r.series.target)}, {"alpha", r.series.alpha},
                    {"eps_lines", r.eps_lines}, {"eps", r.eps}, {"mean_V", r.full.mean},
                    {"se_V", r.full.std_error}, {"mean_V_half", r.half.mean},
                    {"se_V_half", r.half.std_error}, {"linear", r.linear()}});
  }
  json slopes = json::array();
  const double range = static_cast<double>(*std::max_element(spec.eps_lines.begin(), spec.eps_lines.end())) /
                       *std::min_element(spec.eps_lines.begin(), spec.eps_lines.end());
  for (const auto& s : res.slopes) {
    slopes.push_back({{"target", target_name(s.series.target)}, {"alpha", s.series.alpha},
                      {"slope", s.fit.slope}, {"slope_se", s.fit.slope_se}, {"r_squared", s.fit.r_squared}});
    const double c = critical_alpha(s.series.target);
    const std::string name = std::string(target_name(s.series.target)) + "_alpha_" + num(s.series.alpha);
    const std::string detail = "slope " + num(s.fit.slope) + " over eps range x" + num(range);
    if (std::abs(s.series.alpha - c) < 1e-12) {
      run.check(name + "_flat", std::abs(s.fit.slope) <= 0.25, detail + ", need |slope| <= 0.25");
      bool linear = true;
      for (const auto& r : res.rows) {
        if (r.series.target == s.series.target && r.series.alpha == s.series.alpha) linear = linear && r.linear();
      }
      run.check(name + "_interval_linearity", linear, "V[a,(a+b)/2] vs V[a,b]/2 within combined 95% CI at every eps");
    } else if (s.series.alpha < c) {
      run.check(name + "_diverges", s.fit.slope <= -0.3, detail + ", need <= -0.3");
    } else {
      run.check(name + "_vanishes", s.fit.slope >= 0.3, detail + ", need >= +0.3");
    }
  }
  run.results = {{"rows", rows}, {"slopes", slopes}, {"eps_range_factor", range},
                 {"edge_contacts", res.edge_contacts}};
  write_paths(run, p, std::min<std::size_t>(f.paths, N));
}

// ------------------------------------------------------------------- tails

std::pair<double, double> parse_band(const Flags& f) {
  const auto b = parse_list<double>(f.band.value_or("0.5,0.99"), "band");
  if (b.size() != 2) throw ConfigError("--band needs two quantiles lo,hi");
  return {b[0], b[1]};
}

void run_tails(Run& run) {
  const Flags& f = run.flags;
  const LatticeParams p = lattice(f, 512);
  const std::size_t N = samples(f, 1000);
  echo_lattice(run, p, N);
  const double s = f.s.value_or(0.5);
  const auto eps = parse_list<int>(f.eps_lines.value_or("32"), "eps-lines");
  if (eps.size() != 1) throw ConfigError("tails takes a single --eps-lines value");
  const auto [lo, hi] = parse_band(f);
  run.config["s"] = s;
  run.config["eps_lines"] = eps[0];
  run.config["band"] = {lo, hi};

  IncrementSamples inc;
  try {
    inc = increment_samples(base_rng(run), p, s, eps[0], N, f.workers);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  {
    Csv csv(run, "increments", {"replica", "I", "W"});
    for (std::size_t i = 0; i < N; ++i) csv.row(i, inc.I[i], inc.W[i]);
  }
  struct Q {
    const char* name;
    const std::vector<double>* data;
    double lo, hi;
  };
  const Q qs[] = {{"transversal", &inc.transversal, 2.2, 3.8},
                  {"I", &inc.I, 2.2, 3.8},
                  {"W", &inc.W, 1.1, 1.9}};
  std::vector<TailFit> fits;
  try {
    for (const auto& q : qs) fits.push_back(fit_tail_exponent(*q.data, lo, hi));
  } catch (const std::exception& e) {
    throw ConfigError(std::string("tail fit: ") + e.what());
  }
  {
    Csv csv(run, "tails", {"quantity", "m", "survival"});
    for (const auto& q : qs) {
      std::vector<double> a;
      for (double v : *q.data) a.push_back(std::abs(v));
      std::sort(a.begin(), a.end());
      std::vector<double> ms;
      for (int k = 1; k < 200; ++k) ms.push_back(a[static_cast<std::size_t>(k * (a.size() - 1) / 200)]);
      for (double qq : {0.995, 0.999}) ms.push_back(a[static_cast<std::size_t>(qq * static_cast<double>(a.size() - 1))]);
      ms.erase(std::unique(ms.begin(), ms.end()), ms.end());
      const auto surv = empirical_survival(a, ms);
      for (std::size_t k = 0; k < ms.size(); ++k) csv.row(q.name, ms[k], surv[k]);
    }
  }
  Csv fit_csv(run, "tails-fit", {"quantity", "beta_hat", "r_squared", "band_lo", "band_hi"});
  json fj = json::array();
  for (std::size_t i = 0; i < fits.size(); ++i) {
    const auto& t = fits[i];
    fit_csv.row(qs[i].name, t.beta_hat, t.r_squared, t.band_lo, t.band_hi);
    fj.push_back({{"quantity", qs[i].name}, {"beta_hat", t.beta_hat}, {"r_squared", t.r_squared},
                  {"band_lo", t.band_lo}, {"band_hi", t.band_hi}, {"n_points", t.n_points}});
    run.check(std::string(qs[i].name) + "_tail_exponent",
              t.beta_hat >= qs[i].lo && t.beta_hat <= qs[i].hi,
              "beta_hat " + num(t.beta_hat) + ", need [" + num(qs[i].lo) + ", " + num(qs[i].hi) + "]");
  }
  run.check("weight_partition", inc.partition_failures == 0,
            std::to_string(inc.partition_failures) + " replicas off by more than 1e-9");
  run.results = {{"fits", fj}, {"eps", inc.eps}, {"partition_failures", inc.partition_failures},
                 {"edge_contacts", inc.edge_contacts}};
}

// ------------------------------------------------------------- environment

void run_environment(Run& run) {
  const Flags& f = run.flags;
  const LatticeParams p = lattice(f, 512);
  const std::size_t N = samples(f, 1000);
  echo_lattice(run, p, N);
  const double r = f.r.value_or(0.5);
  const auto eps = parse_list<int>(f.eps_lines.value_or("8,32"), "eps-lines");
  const auto probes = parse_list<double>(f.probes.value_or("-1,-0.5,0,0.5,1"), "probes");
  run.config["r"] = r;
  run.config["eps_lines"] = eps;
  run.config["probes"] = probes;
  EnvironmentResult res;
  try {
    res = environment_experiment(base_rng(run), p, r, eps, probes, N, f.workers);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  const auto& primary = res.scales.front();
  {
    Csv csv(run, "environment", {"z", "stat_bessel", "stat_brownian", "threshold"});
    for (const auto& pr : primary.probes) {
      csv.row(pr.z, pr.bessel.statistic, pr.brownian.statistic, pr.bessel.threshold);
    }
  }
  json scales = json::array();
  for (const auto& sc : res.scales) {
    json pj = json::array();
    for (const auto& pr : sc.probes) {
      pj.push_back({{"z", pr.z}, {"stat_bessel", pr.bessel.statistic},
                    {"stat_brownian", pr.brownian.statistic}, {"threshold", pr.bessel.threshold}});
    }
    scales.push_back({{"eps_lines", sc.eps_lines}, {"eps", sc.eps},
                      {"sign_violations", sc.sign_violations}, {"probes", pj}});
    run.check("sign_property_eps_lines_" + std::to_string(sc.eps_lines), sc.sign_violations == 0,
              std::to_string(sc.sign_violations) + " of " + std::to_string(N) + " replicas violate F + G <= 0");
  }
  for (const auto& pr : primary.probes) {
    if (std::abs(pr.z - 1.0) > 1e-12) continue;
    run.check("bessel_at_z1", pr.bessel.below(),
              "KS " + num(pr.bessel.statistic) + " vs threshold " + num(pr.bessel.threshold));
    run.check("brownian_at_z1", pr.brownian.below(),
              "KS " + num(pr.brownian.statistic) + " vs threshold " + num(pr.brownian.threshold));
  }
  run.results = {{"r", res.r}, {"primary_eps_lines", primary.eps_lines}, {"scales", scales}};
}

// --------------------------------------------------------------- limit-env

void run_limit_env(Run& run) {
  const Flags& f = run.flags;
  LatticeParams p = lattice(f, 128);
  p.half_window = 1.5;  // unused here; --window is M
  const std::size_t N = samples(f, 1000);
  const double M = f.window.value_or(6.0);
  LimitParams lp;
  try {
    lp = limit_params(p, M);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  echo_lattice(run, p, N);
  run.config["delta"] = lp.delta;
  run.config["window"] = M;
  std::vector<LimitSample> s;
  std::vector<LimitSample> wide;
  const std::size_t n_stable = std::min<std::size_t>(N, 1000);
  try {
    s = limit_samples(base_rng(run), lp, N, f.workers);
    LimitParams lw = lp;
    lw.M = M + 2.0;
    wide = limit_samples(base_rng(run), lw, n_stable, f.workers);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  run.config["stability_samples"] = n_stable;
  {
    Csv csv(run, "limit-env", {"replica", "X", "Y", "length"});
    for (std::size_t i = 0; i < N; ++i) csv.row(i, s[i].X, s[i].Y, s[i].length);
  }
  const auto nu = nu_from(s);
  const auto mu = mu_from(s);
  {
    Csv csv(run, "limit-env-summary", {"nu_hat", "nu_se", "mu_hat", "mu_se"});
    csv.row(nu.mean, nu.std_error, mu.mean, mu.std_error);
  }
  std::size_t outside = 0, changed = 0;
  std::vector<double> xs, minus_ys, lengths;
  for (const auto& v : s) {
    if (std::abs(v.X) > M + 1e-9 || std::abs(v.Y) > M + 1e-9) ++outside;
    xs.push_back(v.X);
    minus_ys.push_back(-v.Y);
    lengths.push_back(v.length);
  }
  for (std::size_t i = 0; i < n_stable; ++i) {
    if (std::abs(s[i].X - wide[i].X) > 1e-9 || std::abs(s[i].Y - wide[i].Y) > 1e-9) ++changed;
  }
  const auto flip = two_sample_distance(xs, minus_ys);
  run.check("inside_window", outside == 0, std::to_string(outside) + " replicas outside [-M, M]^2");
  run.check("truncation_stability", static_cast<double>(changed) < 0.05 * static_cast<double>(n_stable),
            std::to_string(changed) + " of " + std::to_string(n_stable) + " change at M + 2");
  run.check("flip_symmetry", flip.below(),
            "KS(X, -Y) " + num(flip.statistic) + " vs threshold " + num(flip.threshold));
  run.results = {{"nu_hat", nu.mean}, {"nu_se", nu.std_error}, {"mu_hat", mu.mean},
                 {"mu_se", mu.std_error}, {"mean_length", mean(lengths)},
                 {"mean_length_se", standard_error(lengths)}, {"truncation_changed", changed},
                 {"flip_statistic", flip.statistic}, {"flip_threshold", flip.threshold}};
}

// ------------------------------------------------------------ independence

void run_independence(Run& run) {
  const Flags& f = run.flags;
  const LatticeParams p = lattice(f, 512);
  const std::size_t N = samples(f, 1000);
  echo_lattice(run, p, N);
  const auto times = parse_list<double>(f.times.value_or("0.25,0.75"), "times");
  if (times.size() != 2) throw ConfigError("--times needs two values t1,t2");
  const auto eps = parse_list<int>(f.eps_lines.value_or("8"), "eps-lines");
  if (eps.size() != 1) throw ConfigError("independence takes a single --eps-lines value");
  run.config["times"] = times;
  run.config["eps_lines"] = eps[0];
  run.config["resamples"] = 1000;
  IndependenceResult res;
  try {
    res = independence_experiment(base_rng(run), p, times[0], times[1], eps[0], N, f.workers);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  Csv csv(run, "independence", {"t1", "t2", "eps", "corr", "ci_lo", "ci_hi"});
  csv.row(res.t1, res.t2, res.eps, res.corr.estimate, res.corr.lo, res.corr.hi);
  run.check("small_correlation", std::abs(res.corr.estimate) < 0.1, "corr " + num(res.corr.estimate));
  run.check("ci_covers_zero", res.corr.covers(0.0),
            "95% CI [" + num(res.corr.lo) + ", " + num(res.corr.hi) + "]");
  run.results = {{"corr", res.corr.estimate}, {"ci_lo", res.corr.lo}, {"ci_hi", res.corr.hi},
                 {"eps", res.eps}};
}

// ------------------------------------------------------------------ holder

void run_holder(Run& run) {
  const Flags& f = run.flags;
  const LatticeParams p = lattice(f, 512);
  const std::size_t N = samples(f, 500);
  echo_lattice(run, p, N);
  const auto res_list = parse_list<int>(f.resolutions.value_or("8,32,128"), "resolutions");
  run.config["resolutions"] = res_list;
  HolderResult res;
  try {
    res = holder_experiment(base_rng(run), p, res_list, N, f.workers);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  Csv csv(run, "holder", {"resolution", "median_ratio_pi", "median_ratio_W",
                          "median_logcorrected_pi", "median_logcorrected_W"});
  json rows = json::array();
  for (const auto& r : res.rows) {
    csv.row(r.resolution, r.median_pi, r.median_W, r.median_log_pi, r.median_log_W);
    rows.push_back({{"resolution", r.resolution}, {"median_ratio_pi", r.median_pi},
                    {"median_ratio_W", r.median_W}, {"median_logcorrected_pi", r.median_log_pi},
                    {"median_logcorrected_W", r.median_log_W}});
  }
  const auto increasing = [&](double HolderRow::*m) {
    for (std::size_t i = 1; i < res.rows.size(); ++i) {
      if (!(res.rows[i].*m > res.rows[i - 1].*m)) return false;
    }
    return res.rows.size() >= 3;
  };
  const auto spread = [&](double HolderRow::*m) {
    double lo = res.rows[0].*m, hi = lo;
    for (const auto& r : res.rows) {
      lo = std::min(lo, r.*m);
      hi = std::max(hi, r.*m);
    }
    return hi / lo - 1.0;
  };
  run.check("pi_plain_increasing", increasing(&HolderRow::median_pi), "median Hoelder-2/3 ratio of pi");
  run.check("W_plain_increasing", increasing(&HolderRow::median_W), "median Hoelder-1/3 ratio of W");
  run.check("pi_logcorrected_bounded", spread(&HolderRow::median_log_pi) < 0.5,
            "max/min - 1 = " + num(spread(&HolderRow::median_log_pi)));
  run.check("W_logcorrected_bounded", spread(&HolderRow::median_log_W) < 0.5,
            "max/min - 1 = " + num(spread(&HolderRow::median_log_W)));
  run.check("nested_monotone", res.monotonicity_violations == 0,
            std::to_string(res.monotonicity_violations) + " replicas decrease under refinement");
  run.results = {{"rows", rows}, {"monotonicity_violations", res.monotonicity_violations}};
}

// --------------------------------------------------------------- invariance

void run_invariance(Run& run) {
  const Flags& f = run.flags;
  const LatticeParams p = lattice(f, 128);
  const std::size_t N = samples(f, 1000);
  echo_lattice(run, p, N);
  std::vector<InvarianceCheck> checks;
  try {
    checks = invariance_experiment(base_rng(run), p, N, f.workers);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  Csv csv(run, "invariance", {"check", "statistic", "threshold", "mean_a", "mean_b"});
  json rows = json::array();
  for (const auto& c : checks) {
    csv.row(c.name, c.ks.statistic, c.ks.threshold, c.mean_a, c.mean_b);
    rows.push_back({{"check", c.name}, {"statistic", c.ks.statistic},
                    {"threshold", c.ks.threshold}, {"mean_a", c.mean_a}, {"mean_b", c.mean_b}});
    run.check(c.name, c.ks.below(), "KS " + num(c.ks.statistic) + " vs threshold " + num(c.ks.threshold));
  }
  run.results = {{"checks", rows}};
}

const std::map<std::string, std::pair<const char*, std::function<void(Run&)>>>& commands() {
  static const std::map<std::string, std::pair<const char*, std::function<void(Run&)>>> m = {
      {"selftest", {"exact grid identities against brute force", run_selftest_cmd}},
      {"variation", {"alpha-variation of geodesics and weights across scales", run_variation}},
      {"tails", {"transversal and increment tail exponents", run_tails}},
      {"environment", {"local environment vs Brownian and Bessel-3 laws", run_environment}},
      {"limit-env", {"limit environment argmax, nu and mu", run_limit_env}},
      {"independence", {"correlation of distant increments", run_independence}},
      {"holder", {"Hoelder ratios across resolutions", run_holder}},
      {"invariance", {"scaling, translation and reflection symmetries", run_invariance}},
  };
  return m;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"kpzlab: Monte-Carlo experiments on Brownian last passage percolation"};
  app.require_subcommand(1, 1);
  app.fallthrough();
  app.set_config("--config", "", "TOML/INI config file; command-line flags take precedence");
  Flags f;
  app.add_option("--seed", f.seed, "random seed")->envname("KPZLAB_SEED");
  app.add_option("--n-lines", f.n_lines, "lines per unit time");
  app.add_option("--delta", f.delta, "grid step (default a_n / 4)");
  app.add_option("--window", f.window, "window half-width (limit-env: M)");
  app.add_option("--eps-lines", f.eps_lines, "comma list of scales in line spacings");
  app.add_option("--alphas", f.alphas, "comma list of variation exponents");
  app.add_option("--n-samples", f.n_samples, "replicas");
  app.add_option("--out-dir", f.out_dir, "output directory");
  app.add_option("--workers", f.workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_option("--target", f.target, "variation target: pi, weight or both");
  app.add_option("--band", f.band, "tail-fit quantile band lo,hi");
  app.add_option("--times", f.times, "independence times t1,t2");
  app.add_option("--probes", f.probes, "environment probe points");
  app.add_option("--resolutions", f.resolutions, "holder resolutions");
  app.add_option("-s,--s", f.s, "increment time s");
  app.add_option("-r,--r", f.r, "environment time r");
  app.add_option("--cells-per-shift", f.cells_per_shift, "grid cells per line shift")
      ->check(CLI::PositiveNumber);
  app.add_option("--calibration-samples", f.calibration_samples, "fields used to calibrate the grid bias");
  app.add_option("--paths", f.paths, "variation: replicas written to the paths CSVs");
  for (const auto& [name, entry] : commands()) app.add_subcommand(name, entry.first);

  if (!args.empty() && !args[0].empty() && args[0][0] != '-' && !commands().count(args[0])) {
    err << "kpzlab: unknown subcommand '" << args[0] << "'\n";
    return kConfigError;
  }
  std::vector<std::string> storage{"kpzlab"};
  storage.insert(storage.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : storage) argv.push_back(s.data());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kPass : kConfigError;
  }

  Run run;
  run.sub = app.get_subcommands().front()->get_name();
  run.flags = f;
  run.config = {{"subcommand", run.sub}, {"seed", f.seed}, {"version", kVersion}};
  const auto t0 = std::chrono::steady_clock::now();
  try {
    std::error_code ec;
    std::filesystem::create_directories(f.out_dir, ec);
    if (ec) throw ConfigError("cannot create " + f.out_dir + ": " + ec.message());
    commands().at(run.sub).second(run);
  } catch (const ConfigError& e) {
    err << "kpzlab " << run.sub << ": " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "kpzlab " << run.sub << ": " << e.what() << "\n";
    return kConfigError;
  }
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  bool all = true;
  json crit = json::array();
  for (const auto& c : run.criteria) {
    all = all && c.passed;
    crit.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    out << (c.passed ? "PASS " : "FAIL ") << run.sub << "/" << c.name << ": " << c.detail << "\n";
  }
  json report = {{"name", run.sub}, {"config", run.config}, {"workers", f.workers},
                 {"out_dir", f.out_dir}, {"results", run.results}, {"criteria", crit},
                 {"passed", all}, {"wall_time_s", wall}, {"files", run.files}};
  const auto path = run.file(run.sub, ".json");
  std::ofstream js(path);
  if (!js) {
    err << "kpzlab: cannot write " << path.string() << "\n";
    return kConfigError;
  }
  js << report.dump(2) << "\n";
  return all ? kPass : kCriterionFailure;
}

}  // namespace kpzlab::cli
