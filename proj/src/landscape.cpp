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

#include "kpzlab/landscape.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <istream>
#include <ostream>
#include <stdexcept>

namespace kpzlab {

namespace {

std::atomic<std::uint64_t> g_next_field_id{1};

constexpr double kTimeSlack = 1e-9;

std::vector<std::size_t> line_shifts(int n, double a, double delta) {
  std::vector<std::size_t> out(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) {
    out[static_cast<std::size_t>(i)] = static_cast<std::size_t>(std::llround(i * a / delta));
  }
  return out;
}

struct Sweep {
  std::size_t lo = 0;
  std::size_t width = 0;
  std::vector<double> row;
  // 1 where the optimal staircase enters the line at that boundary.
  std::vector<std::uint8_t> entered;
};

// Forward dynamic program over lines j_first..j_last restricted to raw
// boundaries [lo, lo + width). On entry `row` holds values on the boundary
// before line j_first, on exit the values after line j_last. Boundaries
// outside the window at a line time are -infinity.
void sweep_forward(const LppField& field, int j_first, int j_last, Sweep& s,
                   TieBreak tie_break, bool record) {
  const std::size_t w = s.width;
  const std::size_t m = field.window_cells();
  if (record) s.entered.assign(static_cast<std::size_t>(j_last - j_first + 1) * w, 0);
  double* row = s.row.data();
  for (int j = j_first; j <= j_last; ++j) {
    const std::size_t off = field.line_offset(j);
    const std::size_t next = field.shift(j);
    // Boundary range [c0, c1] of this line, in sweep coordinates.
    const std::size_t u0 = std::max(s.lo, off);
    const std::size_t u1 = std::min(s.lo + w - 1, next + m);
    if (u0 > u1) {
      std::fill(row, row + w, kBottom);
      continue;
    }
    const std::size_t c0 = u0 - s.lo, c1 = u1 - s.lo;
    const double* inc = field.line(j).data() + (u0 - off) - 1;  // inc[c - c0] is cell c - 1
    if (!record) {
      for (std::size_t c = c0 + 1; c <= c1; ++c) {
        row[c] = std::max(row[c], row[c - 1] + inc[c - c0]);
      }
    } else {
      std::uint8_t* flag = s.entered.data() + static_cast<std::size_t>(j - j_first) * w;
      flag[c0] = 1;
      if (tie_break == TieBreak::kLeftmost) {
        for (std::size_t c = c0 + 1; c <= c1; ++c) {
          const double left = row[c - 1] + inc[c - c0];
          const bool below = row[c] > left;
          flag[c] = below;
          if (!below) row[c] = left;
        }
      } else {
        for (std::size_t c = c0 + 1; c <= c1; ++c) {
          const double left = row[c - 1] + inc[c - c0];
          const bool below = row[c] >= left;
          flag[c] = below;
          if (!below) row[c] = left;
        }
      }
    }
    // Left of the window at time j.
    const std::size_t stop = std::min(next, s.lo + w);
    for (std::size_t u = u0; u < stop; ++u) row[u - s.lo] = kBottom;
  }
}

// Reverse program: on entry `row` holds values on the boundary after j_last,
// on exit values at entry to line j_first.
void sweep_backward(const LppField& field, int j_first, int j_last, Sweep& s) {
  const std::size_t w = s.width;
  const std::size_t m = field.window_cells();
  double* row = s.row.data();
  for (int j = j_last; j >= j_first; --j) {
    const std::size_t off = field.line_offset(j);
    const std::size_t next = field.shift(j);
    const std::size_t u0 = std::max(s.lo, off);
    const std::size_t u1 = std::min(s.lo + w - 1, next + m);
    if (u0 > u1) {
      std::fill(row, row + w, kBottom);
      continue;
    }
    const std::size_t c0 = u0 - s.lo, c1 = u1 - s.lo;
    const double* inc = field.line(j).data() + (u0 - off);  // inc[c - c0] is cell c
    for (std::size_t c = c1; c-- > c0;) {
      row[c] = std::max(row[c], row[c + 1] + inc[c - c0]);
    }
    // Right of the window at time j - 1.
    for (std::size_t u = std::max(off + m + 1, s.lo); u <= u1; ++u) row[u - s.lo] = kBottom;
  }
}

// Recovers entry positions (relative to s.lo) for each line, ending at `end`.
std::vector<std::size_t> backtrack(const Sweep& s, int j_first, int j_last,
                                   std::size_t end) {
  const auto lines = static_cast<std::size_t>(j_last - j_first + 1);
  std::vector<std::size_t> bps(lines + 1);
  std::size_t pos = end;
  bps[lines] = pos;
  for (std::size_t k = lines; k-- > 0;) {
    const std::uint8_t* flag = s.entered.data() + k * s.width;
    while (!flag[pos]) --pos;
    bps[k] = pos;
  }
  return bps;
}

// Sum of increments along a staircase given raw breakpoints.
double staircase_sum(const LppField& field, int j_first,
                     const std::vector<std::size_t>& bps) {
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < bps.size(); ++k) {
    const int j = j_first + static_cast<int>(k);
    for (std::size_t c = bps[k]; c < bps[k + 1]; ++c) total += field.increment(j, c);
  }
  return total;
}

Geodesic make_geodesic(const LppField& field, int j_first, int j_last,
                       std::vector<std::size_t> bps, double raw_value) {
  Geodesic g;
  g.line_lo = j_first;
  g.line_hi = j_last;
  std::vector<double> xs(bps.size());
  for (std::size_t k = 0; k < bps.size(); ++k) {
    xs[k] = field.x_of_raw(bps[k], j_first - 1 + static_cast<int>(k));
  }
  g.path = SampledPath(static_cast<double>(j_first - 1) / field.n(),
                       1.0 / field.n(), std::move(xs));
  g.breakpoints = std::move(bps);
  g.raw_value = raw_value;
  g.value = raw_value + g.lines() * field.bonus();
  g.field_id = field.id();
  return g;
}

// Start points sit on the boundary before their line, end points after it.
void check_point(const LppField& field, GridPoint p, bool is_end, const char* what) {
  if (p.line < 1 || p.line > field.n()) {
    throw std::invalid_argument(std::string(what) + " line " + std::to_string(p.line) +
                                " is outside the field");
  }
  const std::size_t lo = field.shift(is_end ? p.line : p.line - 1);
  if (p.pos < lo || p.pos > lo + field.window_cells()) {
    throw std::invalid_argument(std::string(what) + " (" + std::to_string(p.pos) +
                                ", line " + std::to_string(p.line) +
                                ") is outside the window");
  }
}

void check_span(const LppField& field, GridPoint start, GridPoint end) {
  check_point(field, start, false, "start");
  check_point(field, end, true, "end");
  if (start.line > end.line) {
    throw std::invalid_argument("start line must not exceed end line");
  }
  if (start.pos > end.pos) {
    throw std::invalid_argument("start position must not exceed end position");
  }
}

void check_times(const LppField& field, int ti, int tj) {
  if (ti < 0 || tj > field.n() || tj <= ti) {
    throw std::out_of_range("time indices " + std::to_string(ti) + " -> " +
                            std::to_string(tj) +
                            " do not span at least one line of the field");
  }
}

}  // namespace

LppScaling LppScaling::for_lines(int n) {
  if (n < 1) throw std::invalid_argument("line count must be at least 1");
  const double cbrt_n = std::cbrt(static_cast<double>(n));
  LppScaling s;
  s.n = n;
  s.drift = -2.0 * cbrt_n;
  s.diffusion = 2.0;
  s.shift_per_line = 0.5 / (cbrt_n * cbrt_n);
  s.bonus_per_line = -1.0 / cbrt_n;
  return s;
}

LppField::LppField(const LppScaling& scaling, double x_min, double x_max,
                   double delta, std::vector<Line> lines, std::uint64_t seed)
    : scaling_(scaling),
      x_min_(x_min),
      x_max_(x_max),
      delta_(delta),
      lines_(std::move(lines)),
      seed_(seed),
      id_(g_next_field_id.fetch_add(1)) {
  if (!(x_min < x_max)) throw std::invalid_argument("window needs x_min < x_max");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  const double cells = std::round((x_max - x_min) / delta);
  if (cells < 1.0) {
    throw std::invalid_argument("window [" + std::to_string(x_min) + ", " +
                                std::to_string(x_max) +
                                "] holds no cell; minimum width is delta = " +
                                std::to_string(delta));
  }
  m_ = static_cast<std::size_t>(cells);
  const int n = scaling_.n;
  shifts_ = line_shifts(n, scaling_.shift_per_line, delta);
  raw_cells_ = m_ + shifts_.back();
  if (lines_.size() != static_cast<std::size_t>(n)) {
    throw std::invalid_argument("field needs exactly n lines");
  }
  for (int j = 1; j <= n; ++j) {
    const auto& l = lines_[static_cast<std::size_t>(j - 1)];
    if (!l || l->size() != line_cells(j)) {
      throw std::invalid_argument("line " + std::to_string(j) + " should hold " +
                                  std::to_string(line_cells(j)) + " cells");
    }
  }
}

std::size_t LppField::line_cells(int j) const {
  return m_ + shift(j) - shift(j - 1);
}

std::size_t LppField::shift(int time_index) const {
  return shifts_.at(static_cast<std::size_t>(time_index));
}

std::span<const double> LppField::line(int j) const {
  return *lines_[static_cast<std::size_t>(j - 1)];
}

int LppField::time_index(double t) const {
  if (!(t >= -kTimeSlack && t <= 1.0 + kTimeSlack)) {
    throw std::out_of_range("time " + std::to_string(t) + " outside [0, 1]");
  }
  return std::clamp(static_cast<int>(std::floor(t * n() + kTimeSlack)), 0, n());
}

std::size_t LppField::x_index(double x) const {
  const double k = std::round((x - x_min_) / delta_);
  if (!(k >= 0.0 && k <= static_cast<double>(m_))) {
    throw std::out_of_range("location " + std::to_string(x) + " outside window [" +
                            std::to_string(x_min_) + ", " + std::to_string(x_max_) +
                            "]");
  }
  return static_cast<std::size_t>(k);
}

double LppField::x_of_raw(std::size_t u, int time_index) const {
  return x_min_ + (static_cast<double>(u) - static_cast<double>(shift(time_index))) *
                      delta_;
}

void LppField::save(std::ostream& os) const {
  const char magic[4] = {'K', 'P', 'Z', 'F'};
  os.write(magic, 4);
  const std::int32_t n32 = n();
  const std::uint64_t cells = m_;
  os.write(reinterpret_cast<const char*>(&n32), sizeof n32);
  os.write(reinterpret_cast<const char*>(&x_min_), sizeof x_min_);
  os.write(reinterpret_cast<const char*>(&x_max_), sizeof x_max_);
  os.write(reinterpret_cast<const char*>(&delta_), sizeof delta_);
  os.write(reinterpret_cast<const char*>(&seed_), sizeof seed_);
  os.write(reinterpret_cast<const char*>(&scaling_.centering), sizeof(double));
  os.write(reinterpret_cast<const char*>(&scaling_.drift_correction), sizeof(double));
  os.write(reinterpret_cast<const char*>(&cells), sizeof cells);
  for (const auto& l : lines_) {
    os.write(reinterpret_cast<const char*>(l->data()),
             static_cast<std::streamsize>(l->size() * sizeof(double)));
  }
  if (!os) throw std::runtime_error("failed to write field checkpoint");
}

LppField LppField::load(std::istream& is) {
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::string(magic, 4) != "KPZF") {
    throw std::runtime_error("not a field checkpoint");
  }
  std::int32_t n32 = 0;
  double x_min = 0, x_max = 0, delta = 0;
  std::uint64_t seed = 0, cells = 0;
  double centering = 0, drift_correction = 0;
  is.read(reinterpret_cast<char*>(&n32), sizeof n32);
  is.read(reinterpret_cast<char*>(&x_min), sizeof x_min);
  is.read(reinterpret_cast<char*>(&x_max), sizeof x_max);
  is.read(reinterpret_cast<char*>(&delta), sizeof delta);
  is.read(reinterpret_cast<char*>(&seed), sizeof seed);
  is.read(reinterpret_cast<char*>(&centering), sizeof centering);
  is.read(reinterpret_cast<char*>(&drift_correction), sizeof drift_correction);
  is.read(reinterpret_cast<char*>(&cells), sizeof cells);
  if (!is || n32 < 1) throw std::runtime_error("truncated field checkpoint header");
  LppScaling sc = LppScaling::for_lines(n32);
  sc.centering = centering;
  sc.drift_correction = drift_correction;
  const auto shifts = line_shifts(n32, sc.shift_per_line, delta);
  std::vector<Line> lines;
  lines.reserve(static_cast<std::size_t>(n32));
  for (std::size_t j = 1; j <= static_cast<std::size_t>(n32); ++j) {
    auto v = std::make_shared<std::vector<double>>(cells + shifts[j] - shifts[j - 1]);
    is.read(reinterpret_cast<char*>(v->data()),
            static_cast<std::streamsize>(v->size() * sizeof(double)));
    if (!is) throw std::runtime_error("truncated field checkpoint body");
    lines.push_back(std::move(v));
  }
  LppField f(sc, x_min, x_max, delta, std::move(lines), seed);
  if (f.window_cells() != cells) throw std::runtime_error("inconsistent field checkpoint");
  return f;
}

namespace {

// Line j is drawn from its own substream, outward from the cell at rescaled
// offset `anchor` (x = 0 when the window holds it): cells to the right from
// one stream, cells to the left from another. Fields on nested windows with
// the same grid therefore share their common cells.
LppField::Line draw_line(const Rng& rng, int j, std::size_t cells, std::size_t anchor,
                         const LppScaling& sc, double delta) {
  auto v = std::make_shared<std::vector<double>>(cells);
  const double mean = sc.line_drift() * delta;
  const double sd = std::sqrt(sc.diffusion * delta);
  const Rng line_rng = rng.split(static_cast<std::uint64_t>(j));
  Rng right = line_rng.split(0), left = line_rng.split(1);
  auto& x = *v;
  const std::size_t a = std::min(anchor, cells);
  for (std::size_t k = a; k < cells; ++k) x[k] = mean + sd * right.normal();
  for (std::size_t k = a; k-- > 0;) x[k] = mean + sd * left.normal();
  return v;
}

std::size_t anchor_cell(double x_min, double x_max, double delta) {
  if (x_min >= 0.0) return 0;
  const double k = std::round(-x_min / delta);
  return static_cast<std::size_t>(std::min(k, std::round((x_max - x_min) / delta)));
}

std::vector<std::size_t> cells_per_line(int n, double a, double x_min, double x_max,
                                        double delta) {
  // Mirrors the LppField constructor so lines can be drawn before it runs.
  const double cells = std::max(std::round((x_max - x_min) / delta), 0.0);
  const auto shifts = line_shifts(n, a, delta);
  std::vector<std::size_t> out(static_cast<std::size_t>(n));
  for (std::size_t j = 0; j < out.size(); ++j) {
    out[j] = static_cast<std::size_t>(cells) + shifts[j + 1] - shifts[j];
  }
  return out;
}

}  // namespace

LppField build_field(Rng& rng, int n, double x_min, double x_max, double delta) {
  return build_field(rng, LppScaling::for_lines(n), x_min, x_max, delta);
}

LppField build_field(Rng& rng, const LppScaling& scaling, double x_min, double x_max,
                     double delta) {
  const int n = scaling.n;
  if (n < 1) throw std::invalid_argument("line count must be at least 1");
  if (!(x_min < x_max)) throw std::invalid_argument("window needs x_min < x_max");
  if (!(delta > 0.0)) throw std::invalid_argument("delta must be > 0");
  const auto cells = cells_per_line(n, scaling.shift_per_line, x_min, x_max, delta);
  std::vector<LppField::Line> lines;
  lines.reserve(static_cast<std::size_t>(n));
  const std::size_t anchor = anchor_cell(x_min, x_max, delta);
  for (int j = 1; j <= n; ++j) {
    lines.push_back(draw_line(rng, j, cells[static_cast<std::size_t>(j - 1)], anchor,
                              scaling, delta));
  }
  return LppField(scaling, x_min, x_max, delta, std::move(lines), rng.seed());
}

double raw_last_passage(const LppField& field, GridPoint start, GridPoint end) {
  check_span(field, start, end);
  Sweep s;
  s.lo = start.pos;
  s.width = end.pos - start.pos + 1;
  s.row.assign(s.width, kBottom);
  s.row[0] = 0.0;
  sweep_forward(field, start.line, end.line, s, TieBreak::kLeftmost, false);
  return s.row.back();
}

std::vector<double> passage_profile(const LppField& field, GridPoint start,
                                    int end_line) {
  check_point(field, start, false, "start");
  if (end_line < start.line || end_line > field.n()) {
    throw std::invalid_argument("end line out of range");
  }
  Sweep s;
  s.lo = start.pos;
  s.width = field.raw_cells() - start.pos + 1;
  s.row.assign(s.width, kBottom);
  s.row[0] = 0.0;
  sweep_forward(field, start.line, end_line, s, TieBreak::kLeftmost, false);
  std::vector<double> out(field.raw_cells() + 1, kBottom);
  std::copy(s.row.begin(), s.row.end(), out.begin() + static_cast<long>(start.pos));
  return out;
}

std::vector<double> passage_profile_to(const LppField& field, GridPoint end,
                                       int start_line) {
  check_point(field, end, true, "end");
  if (start_line < 1 || start_line > end.line) {
    throw std::invalid_argument("start line out of range");
  }
  Sweep s;
  s.lo = 0;
  s.width = end.pos + 1;
  s.row.assign(s.width, kBottom);
  s.row.back() = 0.0;
  sweep_backward(field, start_line, end.line, s);
  std::vector<double> out(field.raw_cells() + 1, kBottom);
  std::copy(s.row.begin(), s.row.end(), out.begin());
  return out;
}

Geodesic extract_geodesic(const LppField& field, GridPoint start, GridPoint end,
                          TieBreak tie_break) {
  check_span(field, start, end);
  Sweep s;
  s.lo = start.pos;
  s.width = end.pos - start.pos + 1;
  s.row.assign(s.width, kBottom);
  s.row[0] = 0.0;
  sweep_forward(field, start.line, end.line, s, tie_break, true);
  auto bps = backtrack(s, start.line, end.line, s.width - 1);
  for (auto& b : bps) b += s.lo;
  return make_geodesic(field, start.line, end.line, std::move(bps), s.row.back());
}

double landscape_at(const LppField& field, std::size_t xi, int ti, std::size_t yi,
                    int tj) {
  check_times(field, ti, tj);
  if (xi > field.window_cells() || yi > field.window_cells()) {
    throw std::out_of_range("landscape query outside the window");
  }
  const std::size_t p0 = field.raw_of(xi, ti);
  const std::size_t p1 = field.raw_of(yi, tj);
  if (p0 > p1) return kBottom;
  return raw_last_passage(field, {p0, ti + 1}, {p1, tj}) + (tj - ti) * field.bonus();
}

double landscape_approx(const LppField& field, const LandscapeQuery& q) {
  return landscape_at(field, field.x_index(q.x), field.time_index(q.s),
                      field.x_index(q.y), field.time_index(q.t));
}

Geodesic landscape_geodesic(const LppField& field, const LandscapeQuery& q,
                            TieBreak tie_break) {
  const int ti = field.time_index(q.s);
  const int tj = field.time_index(q.t);
  check_times(field, ti, tj);
  const std::size_t p0 = field.raw_of(field.x_index(q.x), ti);
  const std::size_t p1 = field.raw_of(field.x_index(q.y), tj);
  if (p0 > p1) {
    throw std::out_of_range("no staircase connects the query points");
  }
  return extract_geodesic(field, {p0, ti + 1}, {p1, tj}, tie_break);
}

std::vector<double> landscape_profile_from(const LppField& field, std::size_t xi,
                                           int ti, int tj) {
  check_times(field, ti, tj);
  if (xi > field.window_cells()) throw std::out_of_range("start outside the window");
  const std::size_t m = field.window_cells();
  Sweep s;
  s.lo = field.raw_of(xi, ti);
  const std::size_t hi = field.raw_of(m, tj);
  std::vector<double> out(m + 1, kBottom);
  if (hi < s.lo) return out;
  s.width = hi - s.lo + 1;
  s.row.assign(s.width, kBottom);
  s.row[0] = 0.0;
  sweep_forward(field, ti + 1, tj, s, TieBreak::kLeftmost, false);
  const double bonus = (tj - ti) * field.bonus();
  for (std::size_t yi = 0; yi <= m; ++yi) {
    const std::size_t u = field.raw_of(yi, tj);
    if (u >= s.lo) out[yi] = s.row[u - s.lo] + bonus;
  }
  return out;
}

std::vector<double> landscape_profile_to(const LppField& field, std::size_t yi,
                                         int tj, int ti) {
  check_times(field, ti, tj);
  if (yi > field.window_cells()) throw std::out_of_range("end outside the window");
  const std::size_t m = field.window_cells();
  Sweep s;
  s.lo = field.raw_of(0, ti);
  const std::size_t hi = field.raw_of(yi, tj);
  std::vector<double> out(m + 1, kBottom);
  if (hi < s.lo) return out;
  s.width = hi - s.lo + 1;
  s.row.assign(s.width, kBottom);
  s.row.back() = 0.0;
  sweep_backward(field, ti + 1, tj, s);
  const double bonus = (tj - ti) * field.bonus();
  for (std::size_t xi = 0; xi <= m; ++xi) {
    const std::size_t u = field.raw_of(xi, ti);
    if (u <= hi) out[xi] = s.row[u - s.lo] + bonus;
  }
  return out;
}

namespace {

Sweep boundary_sweep(const LppField& field, std::span<const double> f, int ti,
                     int tj, TieBreak tie_break, bool record) {
  check_times(field, ti, tj);
  const std::size_t m = field.window_cells();
  if (f.size() != m + 1) {
    throw std::invalid_argument("initial condition must have window_cells + 1 values");
  }
  if (std::all_of(f.begin(), f.end(), [](double v) { return v == kBottom; })) {
    throw std::invalid_argument("initial condition is identically -infinity");
  }
  Sweep s;
  s.lo = field.raw_of(0, ti);
  s.width = field.raw_of(m, tj) - s.lo + 1;
  s.row.assign(s.width, kBottom);
  std::copy(f.begin(), f.end(), s.row.begin());
  sweep_forward(field, ti + 1, tj, s, tie_break, record);
  return s;
}

}  // namespace

std::vector<double> kpz_evolve(const LppField& field, std::span<const double> h0,
                               double s, double t) {
  const int ti = field.time_index(s);
  const int tj = field.time_index(t);
  const Sweep sw = boundary_sweep(field, h0, ti, tj, TieBreak::kLeftmost, false);
  const std::size_t m = field.window_cells();
  const double bonus = (tj - ti) * field.bonus();
  std::vector<double> out(m + 1);
  for (std::size_t yi = 0; yi <= m; ++yi) {
    out[yi] = sw.row[field.raw_of(yi, tj) - sw.lo] + bonus;
  }
  return out;
}

BoundaryGeodesic boundary_geodesic(const LppField& field, std::span<const double> f,
                                   int ti, std::span<const double> g, int tj,
                                   TieBreak tie_break) {
  const std::size_t m = field.window_cells();
  if (g.size() != m + 1) {
    throw std::invalid_argument("final condition must have window_cells + 1 values");
  }
  const Sweep sw = boundary_sweep(field, f, ti, tj, tie_break, true);
  const double bonus = (tj - ti) * field.bonus();
  std::size_t best = m + 1;
  double best_val = kBottom;
  for (std::size_t yi = 0; yi <= m; ++yi) {
    const double v = sw.row[field.raw_of(yi, tj) - sw.lo] + bonus + g[yi];
    const bool better = tie_break == TieBreak::kLeftmost ? v > best_val : v >= best_val;
    if (better && v != kBottom) {
      best = yi;
      best_val = v;
    }
  }
  if (best > m) throw std::invalid_argument("boundary problem has no finite value");
  auto bps = backtrack(sw, ti + 1, tj, field.raw_of(best, tj) - sw.lo);
  for (auto& b : bps) b += sw.lo;
  BoundaryGeodesic out;
  out.x_index = bps.front() - field.shift(ti);
  out.y_index = best;
  const double raw = staircase_sum(field, ti + 1, bps);
  out.geodesic = make_geodesic(field, ti + 1, tj, std::move(bps), raw);
  out.length = out.geodesic.value;
  out.objective = best_val;
  return out;
}

LppField resample_field(const LppField& field, Rng& rng, double time_lo,
                        double time_hi) {
  const int lo = field.time_index(time_lo);
  const int hi = field.time_index(time_hi);
  if (hi <= lo) {
    throw std::invalid_argument("resampling interval contains no line");
  }
  std::vector<LppField::Line> lines;
  lines.reserve(static_cast<std::size_t>(field.n()));
  for (int j = 1; j <= field.n(); ++j) {
    if (j > lo && j <= hi) {
      lines.push_back(draw_line(rng, j, field.line_cells(j),
                                anchor_cell(field.x_min(), field.x_max(), field.delta()),
                                field.scaling(), field.delta()));
    } else {
      lines.push_back(field.line_handle(j));
    }
  }
  return LppField(field.scaling(), field.x_min(), field.x_max(), field.delta(),
                  std::move(lines), field.seed());
}

ScalingCalibration calibrate_scaling(int n, double delta, int samples,
                                     std::uint64_t seed) {
  if (samples < 2) throw std::invalid_argument("calibration needs at least 2 samples");
  const LppScaling base = LppScaling::for_lines(n);
  // Fit over |y| <= 1 inside a wider window so the edges do not truncate
  // the staircases.
  const double half = 2.0, fit_range = 1.0;
  ScalingCalibration cal;
  cal.samples = samples;
  // Accumulate the mean profile offset d(y) = L(0,0;y,1) - L(0,0;0,1).
  std::vector<double> sum_d;
  std::vector<double> ys;
  double sum0 = 0.0, sum0sq = 0.0;
  std::size_t center = 0;
  std::size_t u_length = 0;
  for (int r = 0; r < samples; ++r) {
    Rng rng(seed, static_cast<std::uint64_t>(r));
    const LppField f = build_field(rng, base, -half, half, delta);
    center = f.x_index(0.0);
    u_length = f.shift(n);
    const auto prof = landscape_profile_from(f, center, 0, n);
    if (sum_d.empty()) {
      sum_d.assign(prof.size(), 0.0);
      ys.resize(prof.size());
      for (std::size_t k = 0; k < prof.size(); ++k) ys[k] = f.x_of(k);
    }
    for (std::size_t k = 0; k < prof.size(); ++k) sum_d[k] += prof[k] - prof[center];
    sum0 += prof[center];
    sum0sq += prof[center] * prof[center];
  }
  // Least squares of mean d(y) on (y, -y^2) without intercept.
  double syy = 0, sy3 = 0, sy4 = 0, sdy = 0, sdy2 = 0;
  for (std::size_t k = 0; k < ys.size(); ++k) {
    const double y = ys[k], d = sum_d[k] / samples;
    if (std::abs(y) > fit_range + 1e-12 || !std::isfinite(d)) continue;
    syy += y * y;
    sy3 += y * y * y;
    sy4 += y * y * y * y;
    sdy += d * y;
    sdy2 += d * y * y;
  }
  const double det = syy * sy4 - sy3 * sy3;
  const double tilt = (sdy * sy4 - sdy2 * sy3) / det;
  const double quad = (syy * sdy2 - sy3 * sdy) / det;
  cal.tilt = tilt;
  cal.curvature = -quad;
  const double mean0 = sum0 / samples;
  cal.variance = (sum0sq - samples * mean0 * mean0) / (samples - 1);
  cal.scaling = base;
  cal.scaling.drift_correction = -tilt;
  // The corrected drift adds drift_correction * (u-length) to L(0,0;0,1).
  const double shifted = mean0 + cal.scaling.drift_correction *
                                     static_cast<double>(u_length) * delta;
  cal.scaling.centering = (kTracyWidomGueMean - shifted) / n;
  return cal;
}

}  // namespace kpzlab
