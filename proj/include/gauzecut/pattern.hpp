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

// Pattern ingestion and cutting-path planning: notch detection, segment
// ordering, and arc-length resampling into the executable trajectory.

#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <span>
#include <vector>

#include "gauzecut/common.hpp"

namespace gauzecut {

/// Marked curve in normalized material coordinates ([0, 1]^2 over the gauze).
/// A closed pattern stores each point once; the closing edge is implicit.
struct Pattern {
  std::vector<Vec2> waypoints;
  bool closed = false;
  bool self_intersecting = false;

  /// Polyline in millimetres for a gauze of side `extent_mm`.
  std::vector<Vec2> scaled(double extent_mm) const;
};

/// Validates and normalizes raw points: consecutive duplicates are dropped, a
/// repeated first point (within 1e-9) closes the curve. Throws ConfigError
/// for fewer than 2 distinct points, coordinates outside [0, 1]^2, or a
/// self-intersecting curve.
Pattern make_pattern(std::vector<Vec2> points, bool force_closed = false);

/// Plain-text pattern: one "x,y" pair per line; an optional first line
/// "closed" forces closure. Blank lines and lines starting with '#' are
/// ignored.
Pattern load_pattern(std::istream& in);
Pattern load_pattern(const std::filesystem::path& path);
void write_pattern(std::ostream& out, const Pattern& pattern);

/// Circle of `diameter_mm` centred on the gauze, sampled at `points` points.
Pattern circle_pattern(double diameter_mm, int points, double extent_mm = kGauzeSideMm,
                       Vec2 center = Vec2(0.5, 0.5));

/// Waypoint indices where the turning angle exceeds theta_max (radians).
std::vector<std::size_t> find_notches(const Pattern& pattern, double theta_max);

using Segment = std::vector<Vec2>;

/// Splits the pattern at the notch indices. Open curves split at each notch;
/// closed curves run from notch to notch around the loop, or form a single
/// segment from waypoint 0 back to waypoint 0 when there are no notches.
std::vector<Segment> split_segments(const Pattern& pattern, std::span<const std::size_t> notches);

struct DirectedSegment {
  std::size_t index = 0;
  bool reversed = false;
  bool operator==(const DirectedSegment&) const = default;
};

/// Higher is better. Must be safe to call concurrently.
using OrderScorer = std::function<double(std::span<const DirectedSegment>)>;

enum class OrderMode { kExhaustive, kGreedy };

inline constexpr std::size_t kMaxExhaustiveSegments = 6;

struct OrderSearchResult {
  std::vector<DirectedSegment> best;
  double best_score = 0.0;
  double worst_score = 0.0;  // only meaningful for exhaustive search
  std::size_t evaluated = 0;
};

/// Exhaustive mode scores every ordering and direction assignment and keeps
/// the first maximum in lexicographic order (permutation, then directions
/// with forward before reversed). Greedy mode chains nearest endpoints from
/// segment 0. Throws ConfigError for exhaustive search over more than
/// kMaxExhaustiveSegments segments.
OrderSearchResult order_segments(std::span<const Segment> segments, const OrderScorer& scorer,
                                 OrderMode mode, unsigned threads = 1);

/// Executable cutting path in material millimetres.
struct CutTrajectory {
  std::vector<Segment> segments;
  std::vector<Vec2> flat;
  std::vector<std::size_t> notch_indices;  // start of each segment in `flat`
  std::vector<DirectedSegment> order;      // source segment of each run
  double extent_mm = kGauzeSideMm;

  std::size_t size() const { return flat.size(); }
  /// Index of the run containing flat index n.
  std::size_t segment_of(std::size_t n) const;
  /// Flat indices rearranged so the runs follow source segment order, each
  /// traversed forward. Tracing a quantity in this order makes it independent
  /// of the cutting order.
  std::vector<std::size_t> pattern_order() const;
};

/// Resamples every directed segment at uniform arc length no longer than
/// step_mm (interval count rounded up).
CutTrajectory build_trajectory(std::span<const Segment> segments,
                               std::span<const DirectedSegment> order, double step_mm,
                               double extent_mm = kGauzeSideMm);

/// Uniform arc-length resampling of a polyline into ceil(L / step) intervals.
std::vector<Vec2> resample(std::span<const Vec2> line, double step);

/// CSV: index,segment,source,reversed,x_mm,y_mm,notch. `segment` is the run
/// number in cutting order, `source` the pattern segment it came from;
/// `notch` is 1 where a cut begins at a notch point.
void write_trajectory_csv(std::ostream& out, const CutTrajectory& trajectory);
CutTrajectory read_trajectory_csv(std::istream& in, double extent_mm = kGauzeSideMm);

}  // namespace gauzecut
