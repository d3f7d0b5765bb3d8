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

#include <doctest.h>

#include <cmath>
#include <stdexcept>
#include <vector>

#include "fixtures.hpp"
#include "kpzlab/experiments.hpp"
#include "kpzlab/limit_environment.hpp"
#include "kpzlab/stats.hpp"

using namespace kpzlab;
using kpzlab::testing::field_from_lines;

TEST_CASE("limit argmax matches exhaustive search on a two-line field") {
  for (std::uint64_t rep = 0; rep < 40; ++rep) {
    Rng rng(31, rep);
    const std::size_t cells = 2 + rng.next_u64() % 7;
    std::vector<std::vector<double>> rows(2, std::vector<double>(cells));
    for (auto& r : rows) {
      for (auto& v : r) v = rng.normal();
    }
    const auto f = field_from_lines(rows);
    std::vector<double> B(cells + 1), R(cells + 1);
    for (std::size_t k = 0; k <= cells; ++k) {
      B[k] = std::sin(1.3 * static_cast<double>(k) + static_cast<double>(rep));
      R[k] = 0.5 * std::abs(std::cos(0.7 * static_cast<double>(k * rep)));
    }
    double best = kBottom;
    std::size_t bx = 0, by = 0;
    for (std::size_t x = 0; x <= cells; ++x) {
      for (std::size_t y = 0; y <= cells; ++y) {
        const double L = landscape_at(f, x, 0, y, 2);
        if (L == kBottom) continue;
        const double v = B[x] - R[x] + L - B[y] - R[y];
        if (v > best) {
          best = v;
          bx = x;
          by = y;
        }
      }
    }
    const auto s = solve_limit_environment(f, B, R);
    CHECK(std::abs(s.objective - best) <= 1e-12);
    CHECK(s.x_index == bx);
    CHECK(s.y_index == by);
    CHECK(std::abs(s.length - landscape_at(f, bx, 0, by, 2)) <= 1e-12);

    std::vector<double> shifted = B;
    for (auto& b : shifted) b += 3.7;
    const auto t = solve_limit_environment(f, shifted, R);
    CHECK(t.x_index == s.x_index);
    CHECK(t.y_index == s.y_index);
    CHECK(t.objective == doctest::Approx(s.objective).epsilon(1e-12));
  }
  const auto f = field_from_lines({{1.0, 2.0}, {0.5, -1.0}});
  CHECK_THROWS_AS(solve_limit_environment(f, std::vector<double>(2), std::vector<double>(3)),
                  std::invalid_argument);
}

TEST_CASE("sampled limit environment") {
  LimitParams p = LimitParams::for_lines(16);
  p.M = 2.0;
  CHECK(std::abs(p.M / p.delta - std::round(p.M / p.delta)) < 1e-9);
  for (std::uint64_t r = 0; r < 20; ++r) {
    Rng rng(5, r);
    const auto s = sample_limit_environment(rng, p);
    CHECK(std::abs(s.X) <= p.M);
    CHECK(std::abs(s.Y) <= p.M);
    CHECK(s.window == p.M);
    // Rebuild the same field; the functional at (0, 0) is L(0, 0; 0, 1).
    Rng again(5, r);
    Rng field_rng = again.split(1);
    const auto f = build_field(field_rng, p.scaling, -p.M, p.M, p.delta);
    const std::size_t c = f.x_index(0.0);
    CHECK(s.objective >= landscape_at(f, c, 0, c, 16) - 1e-12);
    CHECK(std::abs(s.length - landscape_at(f, s.x_index, 0, s.y_index, 16)) <= 1e-9);
  }
  Rng rng(1, 0);
  CHECK_THROWS_AS(sample_limit_environment(rng, 16, 1.0, 0.3), std::invalid_argument);
  CHECK_THROWS_AS(sample_limit_environment(rng, 16, -1.0, 0.25), std::invalid_argument);
}

TEST_CASE("moment estimators") {
  std::vector<LimitSample> same(5);
  for (auto& s : same) {
    s.X = -0.5;
    s.Y = 1.5;
    s.length = -2.0;
  }
  const auto nu = nu_from(same);
  CHECK(nu.mean == doctest::Approx(std::pow(2.0, 1.5)));
  CHECK(nu.std_error == 0.0);
  CHECK(nu.exponent == 1.5);
  const auto mu = mu_from(same);
  CHECK(mu.mean == doctest::Approx(8.0));
  CHECK(mu.std_error == 0.0);
  CHECK_THROWS_AS(nu_from(std::span<const LimitSample>(same.data(), 1)), EstimationError);

  LimitParams p = LimitParams::for_lines(8);
  p.M = 2.0;
  const auto est = estimate_nu(Rng(11, 0), p, 50);
  CHECK(est.mean > 0.0);
  CHECK(est.n_samples == 50);

  const auto tails = tail_samples_boundary_argmax(Rng(12, 0), p, 30);
  CHECK(tails.abs_x.size() == 30);
  CHECK(tails.abs_span.size() == 30);
  CHECK(tails.abs_length.size() == 30);
  for (double x : tails.abs_x) CHECK(x <= p.M);
}

TEST_CASE("standard error shrinks like one over root n") {
  LimitParams p = LimitParams::for_lines(8);
  p.M = 2.0;
  double small = 0.0, large = 0.0;
  for (std::uint64_t rep = 0; rep < 10; ++rep) {
    small += estimate_nu(Rng(100 + rep, 0), p, 200).std_error;
    large += estimate_nu(Rng(200 + rep, 0), p, 400).std_error;
  }
  const double ratio = large / small;
  CHECK(ratio >= 0.8 / std::sqrt(2.0));
  CHECK(ratio <= 1.2 / std::sqrt(2.0));
}

TEST_CASE("limit samples do not depend on worker count") {
  LimitParams p = LimitParams::for_lines(8);
  p.M = 2.0;
  const auto a = limit_samples(Rng(3, 0), p, 24, 1);
  const auto b = limit_samples(Rng(3, 0), p, 24, 4);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].X == b[i].X);
    CHECK(a[i].Y == b[i].Y);
    CHECK(a[i].objective == b[i].objective);
  }
}

TEST_CASE("truncation stability and flip symmetry") {
  LatticeParams lattice;
  lattice.n = 32;
  lattice.calibration_samples = 200;
  const LimitParams small = limit_params(lattice, 6.0);
  LimitParams big = small;
  big.M = 8.0;
  const std::size_t N = 400;
  const auto a = limit_samples(Rng(77, 0), small, N);
  const auto b = limit_samples(Rng(77, 0), big, N);
  std::size_t changed = 0;
  std::vector<double> xs, minus_ys;
  for (std::size_t i = 0; i < N; ++i) {
    if (std::abs(a[i].X - b[i].X) > 1e-9 || std::abs(a[i].Y - b[i].Y) > 1e-9) ++changed;
    xs.push_back(b[i].X);
    minus_ys.push_back(-b[i].Y);
  }
  CHECK(changed < N / 20);
  CHECK(two_sample_distance(xs, minus_ys).below());
}
