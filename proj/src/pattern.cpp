// Copyright 2026 The Gauzecut Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "gauzecut/pattern.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <numeric>
#include <ostream>
#include <sstream>
#include <string>

#include "gauzecut/geometry.hpp"
#include "gauzecut/parallel.hpp"

namespace gauzecut {
namespace {

bool has_self_intersection(const std::vector<Vec2>& pts, bool closed) {
  const std::size_t n = pts.size();
  const std::size_t edges = closed ? n : n - 1;
  for (std::size_t i = 0; i < edges; ++i) {
    const Vec2& a = pts[i];
    const Vec2& b = pts[(i + 1) % n];
    for (std::size_t j = i + 1; j < edges; ++j) {
      // Adjacent edges share an endpoint by construction.
      const bool adjacent = (j == i + 1) || (closed && i == 0 && j == edges - 1);
      if (adjacent) continue;
      if (segments_intersect(a, b, pts[j], pts[(j + 1) % n])) return true;
    }
  }
  return false;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

}  // namespace

std::vector<Vec2> Pattern::scaled(double extent_mm) const {
  std::vector<Vec2> out;
  out.reserve(waypoints.size());
  for (const Vec2& p : waypoints) out.push_back(p * extent_mm);
  return out;
}

Pattern make_pattern(std::vector<Vec2> points, bool force_closed) {
  for (const Vec2& p : points) {
    if (!p.allFinite() || p.x() < 0.0 || p.x() > 1.0 || p.y() < 0.0 || p.y() > 1.0) {
      throw ConfigError("pattern: coordinates must lie in [0, 1]^2");
    }
  }
  std::vector<Vec2> pts;
  for (const Vec2& p : points) {
    if (pts.empty() || (p - pts.back()).norm() > 1e-12) pts.push_back(p);
  }
  bool closed = force_closed;
  if (pts.size() >= 3 && (pts.front() - pts.back()).norm() <= 1e-9) {
    closed = true;
    pts.pop_back();
  }
  if (pts.size() < 2) throw ConfigError("pattern: needs at least 2 distinct waypoints");
  if (closed && pts.size() < 3) throw ConfigError("pattern: a closed pattern needs at least 3 waypoints");

  Pattern pattern;
  pattern.waypoints = std::move(pts);
  pattern.closed = closed;
  pattern.self_intersecting = has_self_intersection(pattern.waypoints, closed);
  if (pattern.self_intersecting) throw ConfigError("pattern: curve self-intersects");
  return pattern;
}

Pattern load_pattern(std::istream& in) {
  std::vector<Vec2> pts;
  bool force_closed = false;
  std::string line;
  bool first = true;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#') continue;
    if (first && t == "closed") {
      force_closed = true;
      first = false;
      continue;
    }
    first = false;
    std::istringstream row(t);
    double x = 0.0, y = 0.0;
    char comma = 0;
    if (!(row >> x >> comma >> y) || comma != ',') {
      throw ConfigError("pattern: cannot parse line " + std::to_string(lineno) + ": '" + t + "'");
    }
    pts.emplace_back(x, y);
  }
  return make_pattern(std::move(pts), force_closed);
}

Pattern load_pattern(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("pattern: cannot open " + path.string());
  return load_pattern(in);
}

void write_pattern(std::ostream& out, const Pattern& pattern) {
  out.precision(17);
  if (pattern.closed) out << "closed\n";
  for (const Vec2& p : pattern.waypoints) out << p.x() << ',' << p.y() << '\n';
}

Pattern circle_pattern(double diameter_mm, int points, double extent_mm, Vec2 center) {
  if (points < 3) throw ConfigError("pattern: circle needs at least 3 points");
  const double r = 0.5 * diameter_mm / extent_mm;
  std::vector<Vec2> pts;
  pts.reserve(points);
  for (int i = 0; i < points; ++i) {
    const double a = 2.0 * kPi * i / points;
    pts.emplace_back(center.x() + r * std::cos(a), center.y() + r * std::sin(a));
  }
  return make_pattern(std::move(pts), true);
}

std::vector<std::size_t> find_notches(const Pattern& pattern, double theta_max) {
  const auto& p = pattern.waypoints;
  const std::size_t n = p.size();
  std::vector<std::size_t> notches;
  auto turning = [&](std::size_t prev, std::size_t at, std::size_t next) {
    const Vec2 u = p[at] - p[prev];
    const Vec2 v = p[next] - p[at];
    const double c = u.dot(v) / (u.norm() * v.norm());
    return std::acos(std::clamp(c, -1.0, 1.0));
  };
  if (pattern.closed) {
    for (std::size_t i = 0; i < n; ++i) {
      if (turning((i + n - 1) % n, i, (i + 1) % n) > theta_max) notches.push_back(i);
    }
  } else {
    for (std::size_t i = 1; i + 1 < n; ++i) {
      if (turning(i - 1, i, i + 1) > theta_max) notches.push_back(i);
    }
  }
  return notches;
}

std::vector<Segment> split_segments(const Pattern& pattern, std::span<const std::size_t> notches) {
  const auto& p = pattern.waypoints;
  const std::size_t n = p.size();
  std::vector<Segment> out;
  if (!pattern.closed) {
    std::vector<std::size_t> cuts{0};
    for (std::size_t k : notches) {
      if (k > 0 && k + 1 < n) cuts.push_back(k);
    }
    cuts.push_back(n - 1);
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    for (std::size_t s = 0; s + 1 < cuts.size(); ++s) {
      out.emplace_back(p.begin() + static_cast<std::ptrdiff_t>(cuts[s]),
                       p.begin() + static_cast<std::ptrdiff_t>(cuts[s + 1]) + 1);
    }
    return out;
  }
  std::vector<std::size_t> cuts(notches.begin(), notches.end());
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  if (cuts.empty()) {
    Segment loop(p.begin(), p.end());
    loop.push_back(p.front());
    out.push_back(std::move(loop));
    return out;
  }
  for (std::size_t s = 0; s < cuts.size(); ++s) {
    const std::size_t from = cuts[s];
    const std::size_t to = cuts[(s + 1) % cuts.size()];
    Segment seg;
    std::size_t i = from;
    do {
      seg.push_back(p[i]);
      i = (i + 1) % n;
    } while (i != to);
    seg.push_back(p[to]);
    out.push_back(std::move(seg));
  }
  return out;
}

OrderSearchResult order_segments(std::span<const Segment> segments, const OrderScorer& scorer,
                                 OrderMode mode, unsigned threads) {
  const std::size_t n = segments.size();
  if (n == 0) throw ConfigError("order_segments: no segments");
  for (const Segment& s : segments) {
    if (s.size() < 2) throw ConfigError("order_segments: segment with fewer than 2 points");
  }

  OrderSearchResult result;
  if (mode == OrderMode::kGreedy) {
    std::vector<bool> used(n, false);
    result.best.push_back({0, false});
    used[0] = true;
    Vec2 end = segments[0].back();
    for (std::size_t step = 1; step < n; ++step) {
      double best = std::numeric_limits<double>::infinity();
      DirectedSegment pick;
      for (std::size_t i = 0; i < n; ++i) {
        if (used[i]) continue;
        const double fwd = (segments[i].front() - end).norm();
        const double rev = (segments[i].back() - end).norm();
        if (fwd < best) {
          best = fwd;
          pick = {i, false};
        }
        if (rev < best) {
          best = rev;
          pick = {i, true};
        }
      }
      used[pick.index] = true;
      result.best.push_back(pick);
      end = pick.reversed ? segments[pick.index].front() : segments[pick.index].back();
    }
    result.best_score = scorer ? scorer(result.best) : 0.0;
    result.worst_score = result.best_score;
    result.evaluated = 1;
    return result;
  }

  if (n > kMaxExhaustiveSegments) {
    throw ConfigError("order_segments: exhaustive search supports at most " +
                      std::to_string(kMaxExhaustiveSegments) + " segments; use greedy");
  }
  std::vector<std::vector<DirectedSegment>> candidates;
  std::vector<std::size_t> perm(n);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
      std::vector<DirectedSegment> c(n);
      for (std::size_t k = 0; k < n; ++k) {
        // Position 0 is the most significant bit so masks enumerate in
        // lexicographic order of the direction tuple.
        c[k] = {perm[k], ((mask >> (n - 1 - k)) & 1) != 0};
      }
      candidates.push_back(std::move(c));
    }
  } while (std::next_permutation(perm.begin(), perm.end()));

  std::vector<double> scores(candidates.size());
  parallel_for(candidates.size(), threads, [&](std::size_t i) { scores[i] = scorer(candidates[i]); });
  std::size_t best = 0;
  std::size_t worst = 0;
  for (std::size_t i = 1; i < scores.size(); ++i) {
    if (scores[i] > scores[best]) best = i;
    if (scores[i] < scores[worst]) worst = i;
  }
  result.best = candidates[best];
  result.best_score = scores[best];
  result.worst_score = scores[worst];
  result.evaluated = candidates.size();
  return result;
}

std::size_t CutTrajectory::segment_of(std::size_t n) const {
  const auto it = std::upper_bound(notch_indices.begin(), notch_indices.end(), n);
  return static_cast<std::size_t>(it - notch_indices.begin()) - 1;
}

std::vector<std::size_t> CutTrajectory::pattern_order() const {
  std::vector<std::size_t> runs(notch_indices.size());
  std::iota(runs.begin(), runs.end(), 0);
  if (order.size() == runs.size()) {
    std::stable_sort(runs.begin(), runs.end(),
                     [&](std::size_t a, std::size_t b) { return order[a].index < order[b].index; });
  }
  std::vector<std::size_t> out;
  out.reserve(flat.size());
  for (std::size_t r : runs) {
    const std::size_t lo = notch_indices[r];
    const std::size_t hi = r + 1 < notch_indices.size() ? notch_indices[r + 1] : flat.size();
    const bool rev = order.size() == runs.size() && order[r].reversed;
    for (std::size_t k = 0; k < hi - lo; ++k) out.push_back(rev ? hi - 1 - k : lo + k);
  }
  return out;
}

std::vector<Vec2> resample(std::span<const Vec2> line, double step) {
  if (!(step > 0.0)) throw ConfigError("resample: step must be > 0");
  if (line.size() < 2) throw ConfigError("resample: needs at least 2 points");
  const double total = polyline_length(line);
  const auto intervals = static_cast<std::size_t>(std::max(1.0, std::ceil(total / step - 1e-9)));
  std::vector<Vec2> out;
  out.reserve(intervals + 1);
  out.push_back(line.front());
  std::size_t seg = 0;
  double seg_start = 0.0;
  for (std::size_t j = 1; j < intervals; ++j) {
    const double s = total * static_cast<double>(j) / static_cast<double>(intervals);
    while (seg + 1 < line.size() - 1 && seg_start + (line[seg + 1] - line[seg]).norm() < s) {
      seg_start += (line[seg + 1] - line[seg]).norm();
      ++seg;
    }
    const double len = (line[seg + 1] - line[seg]).norm();
    const double t = len > 0.0 ? std::clamp((s - seg_start) / len, 0.0, 1.0) : 0.0;
    out.push_back(line[seg] + t * (line[seg + 1] - line[seg]));
  }
  out.push_back(line.back());
  return out;
}

CutTrajectory build_trajectory(std::span<const Segment> segments,
                               std::span<const DirectedSegment> order, double step_mm,
                               double extent_mm) {
  if (!(step_mm > 0.0)) throw ConfigError("build_trajectory: step_length must be > 0");
  if (order.empty()) throw ConfigError("build_trajectory: empty ordering");
  CutTrajectory traj;
  traj.extent_mm = extent_mm;
  for (const DirectedSegment& d : order) {
    if (d.index >= segments.size()) throw ConfigError("build_trajectory: segment index out of range");
    Segment pts;
    for (const Vec2& p : segments[d.index]) pts.push_back(p * extent_mm);
    if (d.reversed) std::reverse(pts.begin(), pts.end());
    Segment run = resample(pts, step_mm);
    traj.notch_indices.push_back(traj.flat.size());
    traj.order.push_back(d);
    traj.flat.insert(traj.flat.end(), run.begin(), run.end());
    traj.segments.push_back(std::move(run));
  }
  return traj;
}

void write_trajectory_csv(std::ostream& out, const CutTrajectory& trajectory) {
  out.precision(17);
  out << "index,segment,source,reversed,x_mm,y_mm,notch\n";
  // A run starts at a notch when its first point is also an end of another
  // run; the free ends of an open curve and the seam of an unsplit loop are
  // not notches.
  const auto& runs = trajectory.segments;
  std::vector<bool> starts_at_notch(runs.size(), false);
  for (std::size_t r = 0; r < runs.size(); ++r) {
    if (runs[r].empty()) continue;
    for (std::size_t o = 0; o < runs.size() && !starts_at_notch[r]; ++o) {
      if (o == r || runs[o].empty()) continue;
      starts_at_notch[r] = (runs[o].front() - runs[r].front()).norm() < 1e-9 ||
                           (runs[o].back() - runs[r].front()).norm() < 1e-9;
    }
  }
  for (std::size_t i = 0; i < trajectory.flat.size(); ++i) {
    const std::size_t run = trajectory.segment_of(i);
    const DirectedSegment d = run < trajectory.order.size() ? trajectory.order[run] : DirectedSegment{run, false};
    const bool notch = trajectory.notch_indices[run] == i && starts_at_notch[run];
    out << i << ',' << run << ',' << d.index << ',' << (d.reversed ? 1 : 0) << ','
        << trajectory.flat[i].x() << ',' << trajectory.flat[i].y() << ',' << (notch ? 1 : 0) << '\n';
  }
}

CutTrajectory read_trajectory_csv(std::istream& in, double extent_mm) {
  CutTrajectory traj;
  traj.extent_mm = extent_mm;
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trajectory: empty file");
  std::size_t expected = 0;
  long current = -1;
  while (std::getline(in, line)) {
    if (trim(line).empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    std::size_t index = 0, source = 0;
    long run = 0;
    int reversed = 0, notch = 0;
    double x = 0.0, y = 0.0;
    if (!(row >> index >> run >> source >> reversed >> x >> y >> notch) || index != expected) {
      throw ConfigError("trajectory: malformed row " + std::to_string(expected));
    }
    if (run != current) {
      if (run != current + 1) throw ConfigError("trajectory: segments out of order");
      current = run;
      traj.notch_indices.push_back(index);
      traj.order.push_back({source, reversed != 0});
      traj.segments.emplace_back();
    }
    traj.segments.back().emplace_back(x, y);
    traj.flat.emplace_back(x, y);
    ++expected;
  }
  if (traj.flat.empty()) throw ConfigError("trajectory: no waypoints");
  return traj;
}

}  // namespace gauzecut
