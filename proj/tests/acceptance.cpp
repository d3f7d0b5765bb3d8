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

// Acceptance suite: one PASS/FAIL line per criterion, INFO lines for the
// n = 128 trend. Expensive sample sets are cached as JSON under --cache.

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <thread>

#include <unistd.h>
#include <vector>

#include "cli.hpp"
#include "kpzlab/experiments.hpp"
#include "kpzlab/limit_environment.hpp"
#include "kpzlab/processes.hpp"
#include "kpzlab/stats.hpp"

using namespace kpzlab;
using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

struct Line {
  enum Kind { kPass, kFail, kInfo } kind;
  std::string text;
};

struct Ctx {
  fs::path cache;
  int workers = 1;
  std::vector<Line> lines;
  std::string id;

  void check(bool ok, const std::string& what) { lines.push_back({ok ? Line::kPass : Line::kFail, what}); }
  void info(const std::string& what) { lines.push_back({Line::kInfo, what}); }
};

json cached(Ctx& ctx, const std::string& name, const json& key, const std::function<json()>& make) {
  const fs::path file = ctx.cache / (name + ".json");
  if (!ctx.cache.empty() && fs::exists(file)) {
    std::ifstream is(file);
    json j;
    try {
      is >> j;
      if (j.at("key") == key) return j.at("data");
    } catch (const std::exception&) {
    }
  }
  const auto t0 = std::chrono::steady_clock::now();
  json data = make();
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::cerr << "  [" << name << " sampled in " << num(s) << " s]\n";
  if (!ctx.cache.empty()) {
    fs::create_directories(ctx.cache);
    const fs::path tmp = file.string() + ".tmp" + std::to_string(::getpid());
    {
      std::ofstream os(tmp);
      os << json{{"key", key}, {"data", data}}.dump();
    }
    fs::rename(tmp, file);
  }
  return data;
}

LatticeParams lattice(int n) {
  LatticeParams p;
  p.n = n;
  return p;
}

// ---------------------------------------------------------------- datasets

constexpr std::size_t kN = 10000;

json increments(Ctx& ctx, int n) {
  const int k = n / 16;  // eps^3 = 1/16: 32 lines at n = 512
  const json key = {{"n", n}, {"N", kN}, {"s", 0.5}, {"eps_lines", k}, {"seed", 11}};
  return cached(ctx, "increments-" + std::to_string(n), key, [&] {
    const auto r = increment_samples(Rng(11, 0), lattice(n), 0.5, k, kN, ctx.workers);
    return json{{"I", r.I}, {"W", r.W}, {"transversal", r.transversal},
                {"partition_failures", r.partition_failures}, {"edge_contacts", r.edge_contacts}};
  });
}

// eps = k/n over {1/128, ..., 1/16}
json variation(Ctx& ctx, int n) {
  VariationSpec spec;
  spec.eps_lines.clear();
  for (int k : {4, 8, 16, 32}) spec.eps_lines.push_back(k * n / 512);
  for (double a : {1.0, 1.5, 2.0}) spec.series.push_back({VariationTarget::kPath, a});
  for (double a : {2.0, 3.0, 4.0}) spec.series.push_back({VariationTarget::kWeight, a});
  const json key = {{"n", n}, {"N", kN}, {"eps_lines", spec.eps_lines}, {"seed", 12}};
  return cached(ctx, "variation-" + std::to_string(n), key, [&] {
    const auto r = variation_sweep(Rng(12, 0), lattice(n), spec, kN, ctx.workers);
    json rows = json::array(), slopes = json::array();
    for (const auto& x : r.rows) {
      rows.push_back({{"target", target_name(x.series.target)}, {"alpha", x.series.alpha},
                      {"eps_lines", x.eps_lines}, {"mean", x.full.mean}, {"se", x.full.std_error},
                      {"half_mean", x.half.mean}, {"half_se", x.half.std_error},
                      {"linear", x.linear()}});
    }
    for (const auto& s : r.slopes) {
      slopes.push_back({{"target", target_name(s.series.target)}, {"alpha", s.series.alpha},
                        {"slope", s.fit.slope}, {"slope_se", s.fit.slope_se}});
    }
    return json{{"rows", rows}, {"slopes", slopes}, {"edge_contacts", r.edge_contacts}};
  });
}

json limit_env(Ctx& ctx) {
  const json key = {{"n", 128}, {"M", 6}, {"N", kN}, {"seed", 13}};
  return cached(ctx, "limit-env-128", key, [&] {
    const auto lp = limit_params(lattice(128), 6.0);
    const auto s = limit_samples(Rng(13, 0), lp, kN, ctx.workers);
    const auto nu = nu_from(s), mu = mu_from(s);
    return json{{"nu", {nu.mean, nu.std_error}}, {"mu", {mu.mean, mu.std_error}}};
  });
}

json environment(Ctx& ctx, int n) {
  const std::vector<int> eps = {n / 64, n / 16};
  const std::vector<double> probes = {-1, -0.5, 0, 0.5, 1};
  const json key = {{"n", n}, {"N", kN}, {"r", 0.5}, {"eps_lines", eps}, {"probes", probes}, {"seed", 14}};
  return cached(ctx, "environment-" + std::to_string(n), key, [&] {
    const auto r = environment_experiment(Rng(14, 0), lattice(n), 0.5, eps, probes, kN, ctx.workers);
    json scales = json::array();
    for (const auto& sc : r.scales) {
      json pj = json::array();
      for (const auto& p : sc.probes) {
        pj.push_back({{"z", p.z}, {"bessel", p.bessel.statistic}, {"brownian", p.brownian.statistic},
                      {"threshold", p.bessel.threshold}});
      }
      scales.push_back({{"eps_lines", sc.eps_lines}, {"sign_violations", sc.sign_violations}, {"probes", pj}});
    }
    return json{{"scales", scales}};
  });
}

json independence(Ctx& ctx, int n) {
  const int k = n / 64;
  const json key = {{"n", n}, {"N", kN}, {"eps_lines", k}, {"seed", 15}};
  return cached(ctx, "independence-" + std::to_string(n), key, [&] {
    const auto r = independence_experiment(Rng(15, 0), lattice(n), 0.25, 0.75, k, kN, ctx.workers);
    return json{{"corr", r.corr.estimate}, {"lo", r.corr.lo}, {"hi", r.corr.hi}};
  });
}

json holder(Ctx& ctx, int n) {
  const std::vector<int> res = {8, 32, 128};
  const json key = {{"n", n}, {"N", 500}, {"resolutions", res}, {"seed", 16}};
  return cached(ctx, "holder-" + std::to_string(n), key, [&] {
    const auto r = holder_experiment(Rng(16, 0), lattice(n), res, 500, ctx.workers);
    json rows = json::array();
    for (const auto& x : r.rows) {
      rows.push_back({{"resolution", x.resolution}, {"pi", x.median_pi}, {"W", x.median_W},
                      {"log_pi", x.median_log_pi}, {"log_W", x.median_log_W}});
    }
    return json{{"rows", rows}, {"monotonicity_violations", r.monotonicity_violations}};
  });
}

// -------------------------------------------------------------- criteria

void selftest(Ctx& ctx) {
  const auto r = run_selftest(Rng(10, 0), 200, 2000);
  ctx.check(r.oracle_failures == 0 && r.oracle_instances >= 100,
            "DP vs exhaustive enumeration: " + std::to_string(r.oracle_failures) + " failures in " +
                std::to_string(r.oracle_instances) + " instances");
  ctx.check(r.composition_failures == 0 && r.triples >= 1000,
            "metric composition: " + std::to_string(r.composition_failures) + " failures in " +
                std::to_string(r.triples) + " triples");
  ctx.check(r.triangle_failures == 0 && r.triples >= 1000,
            "triangle inequality: " + std::to_string(r.triangle_failures) + " failures in " +
                std::to_string(r.triples) + " triples");
  ctx.check(r.weight_failures == 0,
            "weight additivity: " + std::to_string(r.weight_failures) + " failures in " +
                std::to_string(r.weight_paths) + " paths");
  ctx.info("largest identity error " + num(r.max_error) + " (tolerance 1e-9)");
}

void estimator_gates(Ctx& ctx) {
  const std::pair<double, double> targets[] = {{1.0, 0.1}, {2.0, 0.2}, {3.0, 0.15}};
  for (const auto& [beta, tol] : targets) {
    Rng rng(20, static_cast<std::uint64_t>(beta));
    std::vector<double> v(100000);
    for (auto& x : v) x = std::pow(-std::log(rng.uniform()), 1.0 / beta);
    const auto f = fit_tail_exponent(v);
    ctx.check(std::abs(f.beta_hat - beta) <= tol,
              "tail oracle beta " + num(beta) + ": beta_hat " + num(f.beta_hat) + " (+-" + num(tol) + ", N = 1e5)");
  }
  {
    MomentAccumulator acc;
    for (std::uint64_t i = 0; i < 100000; ++i) {
      Rng g(21, i);
      acc.add(meander_weight(sample_bessel3(g, 0.0, 0.05, 21)));
    }
    const auto m = acc.estimate();
    ctx.check(std::abs(m.mean - 1.0) <= 3.0 * m.std_error,
              "meander weights: mean " + num(m.mean) + ", SE " + num(m.std_error));
  }
  int below = 0;
  for (std::uint64_t rep = 0; rep < 100; ++rep) {
    Rng ra(22, 2 * rep), rb(22, 2 * rep + 1);
    std::vector<double> a(10000), b(10000);
    for (auto& x : a) x = ra.normal();
    for (auto& x : b) x = rb.normal();
    below += two_sample_distance(a, b).below() ? 1 : 0;
  }
  ctx.check(below >= 95, "two-sample null: " + std::to_string(below) + "/100 below the 1% threshold");
}

void tail_line(Ctx& ctx, const json& d, const char* key, const char* label, double lo, double hi, int n,
               bool criterion) {
  const auto v = d.at(key).get<std::vector<double>>();
  const auto f = fit_tail_exponent(v);
  const std::string text = std::string(label) + " tail at n = " + std::to_string(n) + ": beta_hat " +
                           num(f.beta_hat) + " (r^2 " + num(f.r_squared) + "), need [" + num(lo) + ", " +
                           num(hi) + "]";
  if (criterion) {
    ctx.check(f.beta_hat >= lo && f.beta_hat <= hi, text);
  } else {
    ctx.info(text);
  }
}

void transversal_tail(Ctx& ctx) {
  tail_line(ctx, increments(ctx, 512), "transversal", "|pi(1/2)|", 2.2, 3.8, 512, true);
  tail_line(ctx, increments(ctx, 128), "transversal", "|pi(1/2)|", 2.2, 3.8, 128, false);
}

void increment_tail_I(Ctx& ctx) {
  tail_line(ctx, increments(ctx, 512), "I", "|I|", 2.2, 3.8, 512, true);
  tail_line(ctx, increments(ctx, 128), "I", "|I|", 2.2, 3.8, 128, false);
}

void increment_tail_W(Ctx& ctx) {
  tail_line(ctx, increments(ctx, 512), "W", "|W|", 1.1, 1.9, 512, true);
  tail_line(ctx, increments(ctx, 128), "W", "|W|", 1.1, 1.9, 128, false);
}

void weight_partition(Ctx& ctx) {
  for (int n : {512, 128}) {
    const auto d = increments(ctx, n);
    const auto fails = d.at("partition_failures").get<std::size_t>();
    ctx.check(fails == 0, "W increments over the full partition sum to L(0,0;0,1) at n = " + std::to_string(n) +
                              ": " + std::to_string(fails) + " of " + std::to_string(kN) + " replicas off");
  }
}

double slope_of(const json& d, const std::string& target, double alpha) {
  for (const auto& s : d.at("slopes")) {
    if (s.at("target") == target && s.at("alpha").get<double>() == alpha) return s.at("slope").get<double>();
  }
  throw std::logic_error("missing slope");
}

std::string trend(const json& d, const std::string& target, double alpha) {
  std::string out;
  for (const auto& r : d.at("rows")) {
    if (r.at("target") == target && r.at("alpha").get<double>() == alpha) {
      out += (out.empty() ? "" : " ") + num(r.at("mean").get<double>());
    }
  }
  return out;
}

// kind: 0 critical, -1 below, +1 above
void variation_criterion(Ctx& ctx, const std::string& target, double alpha, int kind) {
  const auto d512 = variation(ctx, 512);
  const auto d128 = variation(ctx, 128);
  const double s = slope_of(d512, target, alpha);
  const std::string head = "V_" + num(alpha) + "(" + target + ") log-log slope over eps x8 at n = 512: " + num(s);
  if (kind == 0) {
    ctx.check(std::abs(s) <= 0.25, head + ", need |slope| <= 0.25");
    for (const auto& r : d512.at("rows")) {
      if (r.at("target") != target || r.at("alpha").get<double>() != alpha) continue;
      ctx.check(r.at("linear").get<bool>(),
                "interval linearity at eps = " + std::to_string(r.at("eps_lines").get<int>()) + "/512: V[0,1/2] " +
                    num(r.at("half_mean").get<double>()) + " vs V[0,1]/2 " + num(r.at("mean").get<double>() / 2));
    }
  } else if (kind < 0) {
    ctx.check(s <= -0.3, head + ", need <= -0.3");
  } else {
    ctx.check(s >= 0.3, head + ", need >= +0.3");
  }
  ctx.info("means at n = 512: " + trend(d512, target, alpha));
  ctx.info("n = 128 at the same eps: slope " + num(slope_of(d128, target, alpha)) + ", means " +
           trend(d128, target, alpha));
}

void cross_check(Ctx& ctx, const std::string& target, double alpha, const char* limit_key, const char* label) {
  const auto v = variation(ctx, 512);
  const auto l = limit_env(ctx);
  double vm = 0, vse = 0;
  int kmin = 1 << 30;
  for (const auto& r : v.at("rows")) {
    if (r.at("target") == target && r.at("alpha").get<double>() == alpha && r.at("eps_lines").get<int>() < kmin) {
      kmin = r.at("eps_lines").get<int>();
      vm = r.at("mean").get<double>();
      vse = r.at("se").get<double>();
    }
  }
  const double lm = l.at(limit_key)[0].get<double>(), lse = l.at(limit_key)[1].get<double>();
  const double z = 1.959963984540054;
  const bool close = std::abs(vm - lm) <= 0.2 * std::abs(lm);
  const bool overlap = vm - z * vse <= lm + z * lse && lm - z * lse <= vm + z * vse;
  ctx.check(close || overlap, std::string(label) + ": variation route " + num(vm) + " +- " + num(vse) + " (eps = " +
                                  std::to_string(kmin) + "/512), limit route " + num(lm) + " +- " + num(lse) +
                                  " (n = 128, M = 6); relative gap " + num(std::abs(vm - lm) / std::abs(lm)));
}

json probe(const json& scale, double z) {
  for (const auto& p : scale.at("probes")) {
    if (p.at("z").get<double>() == z) return p;
  }
  throw std::logic_error("missing probe");
}

void environment_sign(Ctx& ctx) {
  for (int n : {512, 128}) {
    const json d = environment(ctx, n);
    for (const auto& sc : d.at("scales")) {
      const auto v = sc.at("sign_violations").get<std::size_t>();
      ctx.check(v == 0, "F + G <= 0 at n = " + std::to_string(n) + ", eps^3 = " +
                            std::to_string(sc.at("eps_lines").get<int>()) + " lines: " + std::to_string(v) +
                            " violating replicas of " + std::to_string(kN));
    }
  }
}

void environment_law(Ctx& ctx, const char* key, const char* label) {
  const auto d = environment(ctx, 512);
  const auto& primary = d.at("scales")[0];
  const auto p = probe(primary, 1.0);
  ctx.check(p.at(key).get<double>() < p.at("threshold").get<double>(),
            std::string(label) + " at z = 1, n = 512, eps^3 = " + std::to_string(primary.at("eps_lines").get<int>()) +
                " lines: KS " + num(p.at(key).get<double>()) + " vs 1% threshold " +
                num(p.at("threshold").get<double>()));
  for (int n : {512, 128}) {
    const json d = environment(ctx, n);
    for (const auto& sc : d.at("scales")) {
      std::string row;
      for (const auto& q : sc.at("probes")) row += " z=" + num(q.at("z").get<double>()) + ":" + num(q.at(key).get<double>());
      ctx.info("n = " + std::to_string(n) + ", eps^3 = " + std::to_string(sc.at("eps_lines").get<int>()) +
               " lines:" + row);
    }
  }
}

void independence_criterion(Ctx& ctx) {
  const auto d = independence(ctx, 512);
  const double c = d.at("corr"), lo = d.at("lo"), hi = d.at("hi");
  ctx.check(std::abs(c) < 0.1, "corr(|I_0.25|, |I_0.75|) at n = 512, eps^3 = 8 lines: " + num(c));
  ctx.check(lo <= 0.0 && 0.0 <= hi, "bootstrap 95% CI [" + num(lo) + ", " + num(hi) + "] covers 0");
  const auto t = independence(ctx, 128);
  ctx.info("n = 128, eps^3 = 2 lines: corr " + num(t.at("corr")) + ", CI [" + num(t.at("lo")) + ", " +
           num(t.at("hi")) + "]");
}

void holder_criterion(Ctx& ctx, const char* plain, const char* logc, const char* label, bool log_part) {
  const auto d = holder(ctx, 512);
  const auto& rows = d.at("rows");
  bool inc = rows.size() >= 3;
  double lo = 1e300, hi = 0;
  std::string ps, ls;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const double p = rows[i].at(plain), l = rows[i].at(logc);
    if (i > 0 && !(p > rows[i - 1].at(plain).get<double>())) inc = false;
    lo = std::min(lo, l);
    hi = std::max(hi, l);
    ps += " " + num(p);
    ls += " " + num(l);
  }
  if (log_part) {
    ctx.check(hi / lo - 1.0 < 0.5, std::string(label) + " log-corrected medians vary by " + num(100 * (hi / lo - 1)) +
                                       "% (need < 50%):" + ls);
  } else {
    ctx.check(inc, std::string(label) + " plain medians strictly increasing over resolutions 8, 32, 128:" + ps);
    const auto v = d.at("monotonicity_violations").get<std::size_t>();
    ctx.check(v == 0, "per-replica statistic nondecreasing under refinement: " + std::to_string(v) + " violations");
  }
  std::string t;
  const json trend128 = holder(ctx, 128);
  for (const auto& r : trend128.at("rows")) t += " " + num(r.at(plain)) + "/" + num(r.at(logc));
  ctx.info("n = 128 plain/log-corrected:" + t);
}

void determinism(Ctx& ctx) {
  const std::vector<std::vector<std::string>> runs = {
      {"selftest", "--n-samples", "100"},
      {"variation", "--n-lines", "64", "--n-samples", "40", "--eps-lines", "2,4,8", "--target", "both"},
      {"tails", "--n-lines", "64", "--n-samples", "500", "--eps-lines", "4"},
      {"environment", "--n-lines", "64", "--n-samples", "60", "--eps-lines", "1,4", "--probes", "-0.5,0,0.5"},
      {"limit-env", "--n-lines", "32", "--n-samples", "60", "--window", "4"},
      {"independence", "--n-lines", "64", "--n-samples", "60", "--eps-lines", "1"},
      {"holder", "--n-lines", "128", "--n-samples", "40"},
      {"invariance", "--n-lines", "32", "--n-samples", "60"},
  };
  const fs::path root = fs::temp_directory_path() / ("kpzlab-determinism-" + std::to_string(::getpid()));
  for (const auto& base : runs) {
    std::map<std::string, std::string> seen[3];
    const char* tag[3] = {"w1", "w8", "w1-again"};
    const char* w[3] = {"1", "8", "1"};
    int codes[3];
    for (int i = 0; i < 3; ++i) {
      auto args = base;
      const fs::path dir = root / (base[0] + "-" + tag[i]);
      args.insert(args.end(), {"--seed", "5", "--calibration-samples", "40", "--workers", w[i], "--out-dir",
                               dir.string()});
      std::ostringstream out, err;
      codes[i] = cli::run(args, out, err);
      for (const auto& e : fs::directory_iterator(dir)) {
        if (e.path().extension() != ".csv") continue;
        std::ifstream is(e.path(), std::ios::binary);
        std::ostringstream ss;
        ss << is.rdbuf();
        seen[i][e.path().filename().string()] = ss.str();
      }
    }
    const bool ok = codes[0] != cli::kConfigError && !seen[0].empty() && seen[0] == seen[1] && seen[0] == seen[2];
    ctx.check(ok, base[0] + ": " + std::to_string(seen[0].size()) +
                      " CSV files byte-identical across 1 and 8 workers and a repeat run");
  }
  fs::remove_all(root);
}

const std::vector<std::pair<std::string, std::function<void(Ctx&)>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<void(Ctx&)>>> c = {
      {"selftest", selftest},
      {"estimator-gates", estimator_gates},
      {"transversal-tail", transversal_tail},
      {"increment-tail-I", increment_tail_I},
      {"increment-tail-W", increment_tail_W},
      {"weight-partition", weight_partition},
      {"variation-pi-critical", [](Ctx& c) { variation_criterion(c, "pi", 1.5, 0); }},
      {"variation-pi-below", [](Ctx& c) { variation_criterion(c, "pi", 1.0, -1); }},
      {"variation-pi-above", [](Ctx& c) { variation_criterion(c, "pi", 2.0, 1); }},
      {"variation-W-critical", [](Ctx& c) { variation_criterion(c, "weight", 3.0, 0); }},
      {"variation-W-below", [](Ctx& c) { variation_criterion(c, "weight", 2.0, -1); }},
      {"variation-W-above", [](Ctx& c) { variation_criterion(c, "weight", 4.0, 1); }},
      {"nu-cross", [](Ctx& c) { cross_check(c, "pi", 1.5, "nu", "nu"); }},
      {"mu-cross", [](Ctx& c) { cross_check(c, "weight", 3.0, "mu", "mu"); }},
      {"environment-sign", environment_sign},
      {"environment-bessel", [](Ctx& c) { environment_law(c, "bessel", "-(F+G)/2 vs R"); }},
      {"environment-brownian", [](Ctx& c) { environment_law(c, "brownian", "(F-G)/2 vs B"); }},
      {"independence", independence_criterion},
      {"holder-pi", [](Ctx& c) { holder_criterion(c, "pi", "log_pi", "pi", false); }},
      {"holder-pi-log", [](Ctx& c) { holder_criterion(c, "pi", "log_pi", "pi", true); }},
      {"holder-W", [](Ctx& c) { holder_criterion(c, "W", "log_W", "W", false); }},
      {"holder-W-log", [](Ctx& c) { holder_criterion(c, "W", "log_W", "W", true); }},
      {"determinism", determinism},
  };
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"kpzlab acceptance suite"};
  std::vector<std::string> only;
  std::string cache;
  int workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  bool list = false;
  app.add_option("--criterion", only, "run only these criteria (default: all)");
  app.add_option("--cache", cache, "directory for cached sample sets");
  app.add_option("--workers", workers, "worker threads")->check(CLI::PositiveNumber);
  app.add_flag("--list", list, "list criterion ids");
  CLI11_PARSE(app, argc, argv);
  if (list) {
    for (const auto& [id, fn] : criteria()) std::cout << id << "\n";
    return 0;
  }
  for (const auto& o : only) {
    const auto& c = criteria();
    if (std::none_of(c.begin(), c.end(), [&](const auto& e) { return e.first == o; })) {
      std::cerr << "unknown criterion " << o << "\n";
      return 2;
    }
  }
  bool all = true;
  for (const auto& [id, fn] : criteria()) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    Ctx ctx;
    ctx.cache = cache;
    ctx.workers = workers;
    ctx.id = id;
    try {
      fn(ctx);
    } catch (const std::exception& e) {
      ctx.check(false, std::string("error: ") + e.what());
    }
    for (const auto& l : ctx.lines) {
      const char* tag = l.kind == Line::kPass ? "PASS" : l.kind == Line::kFail ? "FAIL" : "INFO";
      std::cout << tag << " " << id << ": " << l.text << "\n";
      all = all && l.kind != Line::kFail;
    }
    std::cout.flush();
  }
  return all ? 0 : 1;
}
