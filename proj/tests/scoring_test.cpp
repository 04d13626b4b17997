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
#include <optional>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "gauzecut/geometry.hpp"
#include "gauzecut/pattern.hpp"
#include "gauzecut/rng.hpp"
#include "gauzecut/scoring.hpp"

namespace gauzecut {
namespace {

RegionMask random_mask(Rng& rng, int res) {
  RegionMask m = RegionMask::empty(res);
  for (auto& c : m.inside) c = rng.below(2) ? 1 : 0;
  return m;
}

bool contains(const std::vector<Vec2>& poly, const Vec2& p) {
  for (const Vec2& q : poly) {
    if ((q - p).norm() < 1e-12) return true;
  }
  return false;
}

std::vector<Vec2> disc(Vec2 c, double r, int n) {
  std::vector<Vec2> out;
  for (int k = 0; k < n; ++k) out.push_back(c + r * Vec2(std::cos(2 * kPi * k / n), std::sin(2 * kPi * k / n)));
  return out;
}

TEST(CloseCurve, ClosedInputIsUnchanged) {
  const Pattern p = circle_pattern(50.0, 100);
  EXPECT_EQ(close_curve(p.waypoints, true), p.waypoints);
}

TEST(CloseCurve, HorizontalChordTieTakesLowerHalf) {
  const std::vector<Vec2> chord{Vec2(0, 0.5), Vec2(1, 0.5)};
  const auto poly = close_curve(chord, false);
  EXPECT_NEAR(std::abs(signed_area(poly)), 0.5, 1e-12);
  EXPECT_TRUE(contains(poly, Vec2(0, 0)));
  EXPECT_TRUE(contains(poly, Vec2(1, 0)));
  const RegionMask m = rasterize(poly, 10);
  EXPECT_EQ(m.count(), 50u);
  for (int col = 0; col < 10; ++col) {
    EXPECT_TRUE(m.at(0, col));
    EXPECT_FALSE(m.at(9, col));
  }
}

TEST(CloseCurve, DiagonalCutsOffCornerTriangle) {
  const std::vector<Vec2> diag{Vec2(0, 0.2), Vec2(0.2, 0)};
  const auto poly = close_curve(diag, false);
  EXPECT_NEAR(std::abs(signed_area(poly)), 0.02, 1e-12);
  EXPECT_TRUE(contains(poly, Vec2(0, 0)));
}

TEST(CloseCurve, InteriorEndsAreExtendedToNearestEdge) {
  // Ends near the left and right edges; nearest exits are (0, 0.3) and (1, 0.3).
  const std::vector<Vec2> curve{Vec2(0.1, 0.3), Vec2(0.5, 0.2), Vec2(0.9, 0.3)};
  const auto poly = close_curve(curve, false);
  EXPECT_TRUE(contains(poly, Vec2(0, 0.3)));
  EXPECT_TRUE(contains(poly, Vec2(1, 0.3)));
  EXPECT_LT(std::abs(signed_area(poly)), 0.5);
}

TEST(CloseCurve, DegenerateClosureThrows) {
  const std::vector<Vec2> edge{Vec2(0, 0), Vec2(1, 0)};
  EXPECT_THROW(close_curve(edge, false), GeometryError);
  const std::vector<Vec2> one{Vec2(0.5, 0.5)};
  EXPECT_THROW(close_curve(one, false), GeometryError);
}

TEST(Rasterize, UnitSquareFillsEveryCell) {
  const std::vector<Vec2> sq{Vec2(0, 0), Vec2(1, 0), Vec2(1, 1), Vec2(0, 1)};
  EXPECT_EQ(rasterize(sq, 10).count(), 100u);
}

TEST(Rasterize, EmptyInteriorGivesNoCells) {
  const std::vector<Vec2> flat{Vec2(0.1, 0.1), Vec2(0.5, 0.5), Vec2(0.9, 0.9)};
  EXPECT_EQ(rasterize(flat, 50).count(), 0u);
}

TEST(Rasterize, DiscAreaWithinOnePercent) {
  const auto poly = disc(Vec2(0.5, 0.5), 0.25, 400);
  const double expected = kPi * 0.25 * 0.25 * 200 * 200;
  EXPECT_NEAR(static_cast<double>(rasterize(poly, 200).count()), expected, 0.01 * expected);
}

TEST(Rasterize, MatchesPointInPolygonOracle) {
  Rng rng(23);
  const auto poly = disc(Vec2(0.45, 0.55), 0.3, 7);
  const RegionMask m = rasterize(poly, 40);
  for (int row = 0; row < 40; ++row) {
    for (int col = 0; col < 40; ++col) {
      const Vec2 c((col + 0.5) / 40, (row + 0.5) / 40);
      // Ray crossing count toward +x.
      bool in = false;
      for (std::size_t i = 0; i < poly.size(); ++i) {
        const Vec2& a = poly[i];
        const Vec2& b = poly[(i + 1) % poly.size()];
        if ((a.y() > c.y()) != (b.y() > c.y()) && c.x() < a.x() + (c.y() - a.y()) * (b.x() - a.x()) / (b.y() - a.y())) {
          in = !in;
        }
      }
      ASSERT_EQ(m.at(row, col), in) << row << ',' << col;
    }
  }
}

TEST(SymmetricDifference, IdentityAndComplement) {
  Rng rng(1);
  const RegionMask a = random_mask(rng, 10);
  EXPECT_EQ(symmetric_difference(a, a).cells, 0u);
  RegionMask full = RegionMask::empty(10);
  for (auto& c : full.inside) c = 1;
  const Score s = symmetric_difference(full, RegionMask::empty(10));
  EXPECT_EQ(s.cells, 100u);
  EXPECT_DOUBLE_EQ(s.normalized, 1.0);
  EXPECT_THROW(symmetric_difference(full, RegionMask::empty(11)), ConfigError);
}

TEST(SymmetricDifference, MatchesBruteForceOnRandomMasks) {
  Rng rng(2);
  for (int trial = 0; trial < 100; ++trial) {
    const RegionMask a = random_mask(rng, 10), b = random_mask(rng, 10);
    std::size_t brute = 0;
    for (int r = 0; r < 10; ++r) {
      for (int c = 0; c < 10; ++c) brute += a.at(r, c) != b.at(r, c);
    }
    EXPECT_EQ(symmetric_difference(a, b).cells, brute);
    RegionMask x = a;
    x.xor_with(b);
    EXPECT_EQ(x.count(), brute);
  }
}

TEST(SymmetricDifference, SymmetricAndSatisfiesTriangleBound) {
  Rng rng(4);
  for (int trial = 0; trial < 100; ++trial) {
    const RegionMask x = random_mask(rng, 16), y = random_mask(rng, 16), z = random_mask(rng, 16);
    EXPECT_EQ(symmetric_difference(x, y).cells, symmetric_difference(y, x).cells);
    EXPECT_LE(symmetric_difference(x, z).cells, symmetric_difference(x, y).cells + symmetric_difference(y, z).cells);
  }
}

TEST(SymmetricDifference, ConvergesUnderRefinement) {
  const auto a = disc(Vec2(0.5, 0.5), 0.25, 300);
  const auto b = disc(Vec2(0.53, 0.51), 0.24, 300);
  std::vector<double> s;
  for (int res : {25, 50, 100, 200, 400, 800}) {
    s.push_back(symmetric_difference(rasterize(a, res), rasterize(b, res)).normalized);
  }
  const double first = std::abs(s[1] - s[0]);
  const double last = std::abs(s[5] - s[4]);
  EXPECT_LT(last, first);
  EXPECT_LT(last, 1e-3);
}

TEST(Regions, RigidTraceMatchesIntention) {
  const Pattern p = circle_pattern(50.0, 100);
  std::vector<std::optional<Vec2>> trace(p.waypoints.begin(), p.waypoints.end());
  const RegionMask want = intended_region(p.waypoints, true);
  EXPECT_EQ(symmetric_difference(want, achieved_region(trace, true)).cells, 0u);
}

TEST(Regions, MissesSplitTheTraceIntoIndependentPieces) {
  // An open line with the middle missed: each half closes against the
  // nearest edge on its own.
  std::vector<std::optional<Vec2>> trace;
  for (int k = 0; k <= 10; ++k) trace.emplace_back(Vec2(0.05 + 0.09 * k, 0.1));
  const RegionMask whole = achieved_region(trace, false, 100);
  trace[5] = std::nullopt;
  const RegionMask split = achieved_region(trace, false, 100);
  std::vector<Vec2> left, right;
  for (int k = 0; k < 5; ++k) left.push_back(*trace[k]);
  for (int k = 6; k <= 10; ++k) right.push_back(*trace[k]);
  RegionMask expected = rasterize(close_curve(left, false), 100);
  expected.xor_with(rasterize(close_curve(right, false), 100));
  EXPECT_EQ(symmetric_difference(split, expected).cells, 0u);
  EXPECT_GT(symmetric_difference(split, whole).cells, 0u);
  const std::vector<std::optional<Vec2>> nothing(5, std::nullopt);
  EXPECT_EQ(achieved_region(nothing, true, 100).count(), 0u);
}

TEST(Regions, PbmExportIsPackedBinary) {
  RegionMask m = RegionMask::empty(10);
  m.inside[0] = 1;  // row 0 col 0, written as the last image row
  std::ostringstream out;
  write_mask_pbm(out, m);
  const std::string s = out.str();
  const std::string header = "P4\n10 10\n";
  ASSERT_EQ(s.rfind(header, 0), 0u);
  ASSERT_EQ(s.size(), header.size() + 20u);
  EXPECT_EQ(static_cast<unsigned char>(s[header.size() + 18]), 0x80);
  EXPECT_EQ(static_cast<unsigned char>(s[header.size()]), 0x00);
}

}  // namespace
}  // namespace gauzecut
