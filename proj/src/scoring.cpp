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

#include "gauzecut/scoring.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>
#include <string>

#include "gauzecut/geometry.hpp"

namespace gauzecut {
namespace {

// Perimeter coordinate in [0, 4), counterclockwise (y-up) from (0, 0).
double perimeter_coord(const Vec2& p) {
  const double x = std::clamp(p.x(), 0.0, 1.0);
  const double y = std::clamp(p.y(), 0.0, 1.0);
  // Nearest edge; ties resolved bottom, right, top, left.
  const double d[4] = {y, 1.0 - x, 1.0 - y, x};
  const int edge = static_cast<int>(std::min_element(d, d + 4) - d);
  switch (edge) {
    case 0: return x;
    case 1: return 1.0 + y;
    case 2: return 2.0 + (1.0 - x);
    default: return std::fmod(3.0 + (1.0 - y), 4.0);
  }
}

Vec2 perimeter_point(double u) {
  u = std::fmod(std::fmod(u, 4.0) + 4.0, 4.0);
  if (u < 1.0) return {u, 0.0};
  if (u < 2.0) return {1.0, u - 1.0};
  if (u < 3.0) return {1.0 - (u - 2.0), 1.0};
  return {0.0, 1.0 - (u - 3.0)};
}

}  // namespace

RegionMask RegionMask::empty(int resolution) {
  if (resolution <= 0) throw ConfigError("mask resolution must be positive");
  RegionMask m;
  m.resolution = resolution;
  m.inside.assign(static_cast<std::size_t>(resolution) * resolution, 0);
  return m;
}

std::size_t RegionMask::count() const {
  return static_cast<std::size_t>(std::count(inside.begin(), inside.end(), std::uint8_t{1}));
}

void RegionMask::xor_with(const RegionMask& other) {
  if (other.resolution != resolution) throw ConfigError("mask resolution mismatch");
  for (std::size_t i = 0; i < inside.size(); ++i) inside[i] ^= other.inside[i];
}

std::vector<Vec2> close_curve(std::span<const Vec2> curve, bool closed) {
  if (curve.size() < 2) throw GeometryError("close_curve: needs at least 2 points");
  std::vector<Vec2> poly(curve.begin(), curve.end());
  if (closed) {
    if (std::abs(signed_area(poly)) < 1e-12) throw GeometryError("close_curve: zero-area polygon");
    return poly;
  }
  const double us = perimeter_coord(curve.front());
  const double ue = perimeter_coord(curve.back());
  const Vec2 exit_s = perimeter_point(us);
  const Vec2 exit_e = perimeter_point(ue);

  poly.clear();
  poly.push_back(exit_s);
  poly.insert(poly.end(), curve.begin(), curve.end());
  poly.push_back(exit_e);

  // Walk from the end exit back to the start exit.
  const double ccw = std::fmod(us - ue + 8.0, 4.0);
  const double cw = 4.0 - ccw;
  const bool go_ccw = ccw < cw - 1e-12;
  const double base = std::floor(ue);
  for (int k = 0; k <= 4; ++k) {
    const double corner = go_ccw ? base + k : base - k;
    const double travelled = go_ccw ? corner - ue : ue - corner;
    if (travelled >= (go_ccw ? ccw : cw)) break;
    if (travelled > 0.0) poly.push_back(perimeter_point(corner));
  }
  if (std::abs(signed_area(poly)) < 1e-12) throw GeometryError("close_curve: degenerate closure");
  return poly;
}

RegionMask rasterize(std::span<const Vec2> polygon, int resolution) {
  RegionMask mask = RegionMask::empty(resolution);
  const std::size_t n = polygon.size();
  // A simple polygon with no area has an empty interior; crossings along a
  // doubled-back edge would otherwise round into sliver spans.
  if (n < 3 || std::abs(signed_area(polygon)) < 1e-15) return mask;
  std::vector<double> xs;
  for (int row = 0; row < resolution; ++row) {
    const double yc = (row + 0.5) / resolution;
    xs.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const Vec2& p = polygon[i];
      const Vec2& q = polygon[(i + 1) % n];
      if ((p.y() <= yc && yc < q.y()) || (q.y() <= yc && yc < p.y())) {
        // Interpolate from the lower end so an edge traversed both ways
        // yields the same crossing.
        const Vec2& lo = p.y() < q.y() ? p : q;
        const Vec2& hi = p.y() < q.y() ? q : p;
        xs.push_back(lo.x() + (yc - lo.y()) * (hi.x() - lo.x()) / (hi.y() - lo.y()));
      }
    }
    std::sort(xs.begin(), xs.end());
    for (std::size_t k = 0; k + 1 < xs.size(); k += 2) {
      // Cells whose centre lies in [xs[k], xs[k+1]).
      const int lo = std::clamp(static_cast<int>(std::ceil(xs[k] * resolution - 0.5)), 0, resolution);
      const int hi = std::clamp(static_cast<int>(std::ceil(xs[k + 1] * resolution - 0.5)), 0, resolution);
      for (int col = lo; col < hi; ++col) {
        mask.inside[static_cast<std::size_t>(row) * resolution + col] ^= 1;
      }
    }
  }
  return mask;
}

Score symmetric_difference(const RegionMask& intended, const RegionMask& achieved) {
  if (intended.resolution != achieved.resolution || intended.inside.size() != achieved.inside.size()) {
    throw ConfigError("symmetric_difference: resolution mismatch (" + std::to_string(intended.resolution) +
                      " vs " + std::to_string(achieved.resolution) + ")");
  }
  std::size_t cells = 0;
  for (std::size_t i = 0; i < intended.inside.size(); ++i) {
    cells += (intended.inside[i] != achieved.inside[i]) ? 1 : 0;
  }
  Score s;
  s.cells = cells;
  s.normalized = static_cast<double>(cells) / (static_cast<double>(intended.resolution) * intended.resolution);
  return s;
}

RegionMask intended_region(std::span<const Vec2> waypoints, bool closed, int resolution) {
  return rasterize(close_curve(waypoints, closed), resolution);
}

RegionMask achieved_region(std::span<const std::optional<Vec2>> points, bool closed, int resolution) {
  RegionMask mask = RegionMask::empty(resolution);
  std::vector<std::vector<Vec2>> pieces(1);
  bool missed = false;
  for (const auto& p : points) {
    if (p) {
      pieces.back().push_back(*p);
    } else {
      missed = true;
      if (!pieces.back().empty()) pieces.emplace_back();
    }
  }
  const bool self_close = closed && !missed;
  for (const auto& piece : pieces) {
    if (piece.size() < 2) continue;
    try {
      const bool as_loop = self_close && piece.size() >= 3;
      mask.xor_with(rasterize(close_curve(piece, as_loop), resolution));
    } catch (const GeometryError&) {
      // Degenerate piece encloses nothing.
    }
  }
  return mask;
}

void write_mask_pbm(std::ostream& out, const RegionMask& mask) {
  const int res = mask.resolution;
  out << "P4\n" << res << ' ' << res << '\n';
  const int bytes = (res + 7) / 8;
  std::vector<char> line(static_cast<std::size_t>(bytes));
  for (int row = res - 1; row >= 0; --row) {
    std::fill(line.begin(), line.end(), 0);
    for (int col = 0; col < res; ++col) {
      if (mask.at(row, col)) line[col / 8] = static_cast<char>(line[col / 8] | (0x80 >> (col % 8)));
    }
    out.write(line.data(), bytes);
  }
}

}  // namespace gauzecut
