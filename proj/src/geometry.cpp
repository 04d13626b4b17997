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

#include "gauzecut/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace gauzecut {
namespace {

template <typename V>
double segment_distance(const V& p, const V& a, const V& b) {
  const V ab = b - a;
  const double len2 = ab.squaredNorm();
  if (len2 == 0.0) return (p - a).norm();
  const double t = std::clamp((p - a).dot(ab) / len2, 0.0, 1.0);
  return (p - (a + t * ab)).norm();
}

double cross(const Vec2& a, const Vec2& b) { return a.x() * b.y() - a.y() * b.x(); }

int orientation(const Vec2& a, const Vec2& b, const Vec2& c) {
  const double v = cross(b - a, c - a);
  const double scale = std::max({(b - a).squaredNorm(), (c - a).squaredNorm(), 1e-300});
  if (std::abs(v) <= 1e-14 * scale) return 0;
  return v > 0 ? 1 : -1;
}

bool on_segment(const Vec2& a, const Vec2& b, const Vec2& p) {
  return std::min(a.x(), b.x()) - 1e-15 <= p.x() && p.x() <= std::max(a.x(), b.x()) + 1e-15 &&
         std::min(a.y(), b.y()) - 1e-15 <= p.y() && p.y() <= std::max(a.y(), b.y()) + 1e-15;
}

}  // namespace

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b) {
  return segment_distance(p, a, b);
}

double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b) {
  return segment_distance(p, a, b);
}

double point_polyline_distance(const Vec2& p, std::span<const Vec2> line, bool closed) {
  if (line.empty()) return std::numeric_limits<double>::infinity();
  if (line.size() == 1) return (p - line[0]).norm();
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < line.size(); ++i) {
    best = std::min(best, segment_distance(p, line[i], line[i + 1]));
  }
  if (closed) best = std::min(best, segment_distance(p, line.back(), line.front()));
  return best;
}

bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d) {
  const int o1 = orientation(a, b, c);
  const int o2 = orientation(a, b, d);
  const int o3 = orientation(c, d, a);
  const int o4 = orientation(c, d, b);
  if (o1 != o2 && o3 != o4) return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

double signed_area(std::span<const Vec2> polygon) {
  double sum = 0.0;
  const std::size_t n = polygon.size();
  for (std::size_t i = 0; i < n; ++i) sum += cross(polygon[i], polygon[(i + 1) % n]);
  return 0.5 * sum;
}

double polyline_length(std::span<const Vec2> line) {
  double len = 0.0;
  for (std::size_t i = 0; i + 1 < line.size(); ++i) len += (line[i + 1] - line[i]).norm();
  return len;
}

Vec2 rotate(const Vec2& p, double radians) {
  const double c = std::cos(radians), s = std::sin(radians);
  return {c * p.x() - s * p.y(), s * p.x() + c * p.y()};
}

}  // namespace gauzecut
