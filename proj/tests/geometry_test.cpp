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


#include <cmath>
#include <vector>

#include <gtest/gtest.h>

#include "gauzecut/geometry.hpp"
#include "gauzecut/rng.hpp"

namespace gauzecut {
namespace {

TEST(Geometry, PointSegmentDistanceCoversInteriorAndEndpoints) {
  const Vec2 a(0, 0), b(2, 0);
  EXPECT_DOUBLE_EQ(point_segment_distance(Vec2(1, 3), a, b), 3.0);
  EXPECT_DOUBLE_EQ(point_segment_distance(Vec2(-3, 4), a, b), 5.0);
  EXPECT_DOUBLE_EQ(point_segment_distance(Vec2(5, 4), a, b), 5.0);
  EXPECT_DOUBLE_EQ(point_segment_distance(Vec2(1, 1), a, a), std::sqrt(2.0));
  EXPECT_DOUBLE_EQ(point_segment_distance(Vec3(1, 1, 1), Vec3(0, 0, 0), Vec3(2, 0, 0)), std::sqrt(2.0));
}

TEST(Geometry, PolylineDistanceMatchesBruteForceSampling) {
  Rng rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<Vec2> line;
    for (int k = 0; k < 5; ++k) line.emplace_back(rng.uniform(), rng.uniform());
    const Vec2 p(rng.uniform(), rng.uniform());
    double brute = 1e9;
    for (std::size_t k = 0; k + 1 < line.size(); ++k) {
      for (int s = 0; s <= 20000; ++s) {
        const double t = s / 20000.0;
        brute = std::min(brute, (p - (line[k] + t * (line[k + 1] - line[k]))).norm());
      }
    }
    EXPECT_NEAR(point_polyline_distance(p, line, false), brute, 1e-4);
    EXPECT_LE(point_polyline_distance(p, line, true), point_polyline_distance(p, line, false));
  }
  const std::vector<Vec2> single{Vec2(1, 1)};
  EXPECT_DOUBLE_EQ(point_polyline_distance(Vec2(4, 5), single, false), 5.0);
}

TEST(Geometry, SegmentIntersection) {
  EXPECT_TRUE(segments_intersect(Vec2(0, 0), Vec2(1, 1), Vec2(0, 1), Vec2(1, 0)));
  EXPECT_FALSE(segments_intersect(Vec2(0, 0), Vec2(1, 0), Vec2(0, 1), Vec2(1, 1)));
  EXPECT_TRUE(segments_intersect(Vec2(0, 0), Vec2(1, 0), Vec2(1, 0), Vec2(2, 1)));  // touching
  EXPECT_TRUE(segments_intersect(Vec2(0, 0), Vec2(2, 0), Vec2(1, 0), Vec2(3, 0)));  // collinear overlap
  EXPECT_FALSE(segments_intersect(Vec2(0, 0), Vec2(1, 0), Vec2(2, 0), Vec2(3, 0)));
}

TEST(Geometry, SignedAreaAndLength) {
  const std::vector<Vec2> sq{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  EXPECT_DOUBLE_EQ(signed_area(sq), 1.0);
  const std::vector<Vec2> cw(sq.rbegin(), sq.rend());
  EXPECT_DOUBLE_EQ(signed_area(cw), -1.0);
  EXPECT_DOUBLE_EQ(polyline_length(sq), 3.0);
}

TEST(Geometry, RotationPreservesNormAndComposes) {
  const Vec2 p(0.3, -0.7);
  EXPECT_NEAR(rotate(p, 1.1).norm(), p.norm(), 1e-15);
  EXPECT_TRUE(rotate(rotate(p, 0.4), 0.7).isApprox(rotate(p, 1.1), 1e-14));
  EXPECT_TRUE(rotate(Vec2(1, 0), kPi / 2).isApprox(Vec2(0, 1), 1e-14));
}

}  // namespace
}  // namespace gauzecut
