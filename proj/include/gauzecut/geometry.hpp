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

#pragma once

#include <span>
#include <vector>

#include "gauzecut/common.hpp"

namespace gauzecut {

double point_segment_distance(const Vec2& p, const Vec2& a, const Vec2& b);
double point_segment_distance(const Vec3& p, const Vec3& a, const Vec3& b);

/// Distance from p to the polyline; `closed` adds the last-to-first edge.
/// A single-point polyline degenerates to point distance.
double point_polyline_distance(const Vec2& p, std::span<const Vec2> line, bool closed);

/// Proper or touching intersection of segments [a, b] and [c, d].
bool segments_intersect(const Vec2& a, const Vec2& b, const Vec2& c, const Vec2& d);

/// Signed shoelace area (positive for counterclockwise in a y-up frame).
double signed_area(std::span<const Vec2> polygon);

double polyline_length(std::span<const Vec2> line);

/// 2-D rotation of p about the origin.
Vec2 rotate(const Vec2& p, double radians);

}  // namespace gauzecut
