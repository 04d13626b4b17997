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

// Region comparison between intended and achieved cuts on a raster of the
// unit material square.

#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "gauzecut/common.hpp"

namespace gauzecut {

inline constexpr int kDefaultResolution = 200;

struct RegionMask {
  int resolution = 0;
  std::vector<std::uint8_t> inside;  // row-major, row i covers y in [i/res, (i+1)/res)

  static RegionMask empty(int resolution);
  bool at(int row, int col) const { return inside[static_cast<std::size_t>(row) * resolution + col] != 0; }
  std::size_t count() const;
  void xor_with(const RegionMask& other);
};

struct Score {
  std::size_t cells = 0;
  double normalized = 0.0;
};

/// Closed input is returned unchanged. An open curve is closed by extending
/// both ends to their nearest edge of [0, 1]^2 and walking the shorter
/// boundary arc between the exit points; on a tie the walk runs clockwise
/// in y-up coordinates (counterclockwise in the raster's row-down view).
/// Throws GeometryError for fewer than 2 points or a zero-area result.
std::vector<Vec2> close_curve(std::span<const Vec2> curve, bool closed);

/// Even-odd test of each cell centre.
RegionMask rasterize(std::span<const Vec2> polygon, int resolution);

/// Throws ConfigError when resolutions differ.
Score symmetric_difference(const RegionMask& intended, const RegionMask& achieved);

/// Region of an intended pattern.
RegionMask intended_region(std::span<const Vec2> waypoints, bool closed,
                           int resolution = kDefaultResolution);

/// Region bounded by the achieved cut. Misses split the trace into pieces;
/// each piece with at least 2 points is closed on its own and the regions are
/// XOR-accumulated. A closed intention with no misses closes the trace on
/// itself. Pieces whose closure is degenerate contribute nothing.
RegionMask achieved_region(std::span<const std::optional<Vec2>> points, bool closed,
                           int resolution = kDefaultResolution);

/// Binary portable bitmap (P4), row 0 of the mask written last so the image
/// is y-up.
void write_mask_pbm(std::ostream& out, const RegionMask& mask);

}  // namespace gauzecut
