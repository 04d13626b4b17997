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


#include <algorithm>
#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "gauzecut/geometry.hpp"
#include "gauzecut/grasp.hpp"
#include "gauzecut/pattern.hpp"

namespace gauzecut {
namespace {

CutTrajectory plan(const Pattern& p, double step) {
  const auto segs = split_segments(p, find_notches(p, 60.0 * kDegToRad));
  std::vector<DirectedSegment> order;
  for (std::size_t i = 0; i < segs.size(); ++i) order.push_back({i, false});
  return build_trajectory(segs, order, step);
}

double point_polyline_distance_mm(const Cloth& c, const Pattern& p, VertexId v) {
  const auto line = p.scaled(kGauzeSideMm);
  return point_polyline_distance(c.material(v), line, p.closed);
}

CemConfig quick_cem(std::uint64_t seed = 1) {
  CemConfig cfg;
  cfg.iterations = 2;
  cfg.population = 4;
  cfg.elite_fraction = 0.5;
  cfg.seed = seed;
  return cfg;
}

// Everything pinned except vertex `free_v`; the pattern runs just past it.
struct Contrast {
  Cloth cloth = Cloth::gauze({PinLayout::kAll, {}});
  VertexId free_v = 0;
  VertexId far_v = 0;
  Pattern pattern;
  CutTrajectory trajectory;

  // A free 3x3 flap in the corner of an otherwise pinned sheet. Without a
  // grasp on its outer corner the flap hangs off its two pinned sides and the
  // line across it lands on the wrong material.
  Contrast() {
    for (int r = 22; r < 25; ++r) {
      for (int c = 22; c < 25; ++c) cloth.release_pin(cloth.vertex(r, c));
    }
    free_v = cloth.vertex(24, 24);
    far_v = cloth.vertex(2, 2);
    const double s = cloth.spacing() / kGauzeSideMm;
    pattern = make_pattern({Vec2(19.0 * s, 22.5 * s), Vec2(23.3 * s, 22.5 * s)});
    trajectory = plan(pattern, 1.0);
  }
  EnvFactory factory() const {
    return [this](VertexId g) { return EpisodeEnv(cloth, trajectory, pattern, g); };
  }
};

TEST(Candidates, AllEligibleWhenKEqualsTheEligibleCount) {
  const Cloth c = Cloth::gauze({});
  const Pattern p = circle_pattern(50.0, 100);
  const auto eligible = eligible_vertices(c, p, 5.0);
  for (VertexId v : eligible) {
    EXPECT_FALSE(c.is_pinned(v));
    EXPECT_GT(point_polyline_distance_mm(c, p, v), 5.0);
  }
  const auto all = sample_candidates(c, p, static_cast<int>(eligible.size()), 5.0, 3);
  EXPECT_EQ(all, eligible);
}

TEST(Candidates, ErrorsWhenNothingIsEligible) {
  const Cloth c = Cloth::gauze({});
  const Pattern p = circle_pattern(50.0, 100);
  EXPECT_THROW(sample_candidates(c, p, 1, 500.0, 1), ConfigError);
  EXPECT_THROW(sample_candidates(c, p, 0, 5.0, 1), ConfigError);
  const auto n = eligible_vertices(c, p, 5.0).size();
  EXPECT_THROW(sample_candidates(c, p, static_cast<int>(n) + 1, 5.0, 1), ConfigError);
}

TEST(Candidates, DeterministicDistinctAndSorted) {
  const Cloth c = Cloth::gauze({});
  const Pattern p = circle_pattern(50.0, 100);
  const auto a = sample_candidates(c, p, 20, 5.0, 42);
  const auto b = sample_candidates(c, p, 20, 5.0, 42);
  EXPECT_EQ(a, b);
  EXPECT_TRUE(std::is_sorted(a.begin(), a.end()));
  EXPECT_EQ(std::adjacent_find(a.begin(), a.end()), a.end());
  EXPECT_NE(a, sample_candidates(c, p, 20, 5.0, 43));
}

TEST(Select, SingleCandidateWins) {
  Cloth c = Cloth::gauze({});
  c.step(500);
  const Pattern p = circle_pattern(50.0, 100);
  const CutTrajectory t = plan(p, 6.0);
  const std::vector<VertexId> cands{c.vertex(3, 20)};
  const GraspSelection s =
      select_grasp(cands, [&](VertexId g) { return EpisodeEnv(c, t, p, g); }, quick_cem());
  EXPECT_EQ(s.best.vertex, cands[0]);
  ASSERT_EQ(s.reports.size(), 1u);
  EXPECT_TRUE(s.reports[0].ok);
}

TEST(Select, GraspHoldingTheFlapWins) {
  const Contrast sc;
  const std::vector<VertexId> cands{sc.far_v, sc.free_v};
  const GraspSelection s = select_grasp(cands, sc.factory(), quick_cem(), 2);
  ASSERT_EQ(s.reports.size(), 2u);
  for (const auto& r : s.reports) ASSERT_TRUE(r.ok) << r.error;
  EXPECT_EQ(s.best.vertex, sc.free_v);
  const auto far = std::find_if(s.reports.begin(), s.reports.end(), [&](auto& r) { return r.vertex == sc.far_v; });
  EXPECT_GT(far->evaluation.score.cells, 2 * s.best.evaluation.score.cells);
}

TEST(Select, TiesGoToTheLowestVertexId) {
  const Cloth c = Cloth::gauze({PinLayout::kAll, {}});
  const Pattern p = circle_pattern(50.0, 100);
  const CutTrajectory t = plan(p, 6.0);
  const std::vector<VertexId> cands{c.vertex(22, 22), c.vertex(2, 2), c.vertex(2, 22)};
  const GraspSelection s =
      select_grasp(cands, [&](VertexId g) { return EpisodeEnv(c, t, p, g); }, quick_cem());
  EXPECT_EQ(s.best.vertex, c.vertex(2, 2));
  for (const auto& r : s.reports) EXPECT_EQ(r.evaluation.score.cells, 0u);
  EXPECT_TRUE(std::is_sorted(s.reports.begin(), s.reports.end(),
                             [](auto& a, auto& b) { return a.vertex < b.vertex; }));
}

TEST(Select, FailedCandidatesAreRecordedAndSkipped) {
  const Cloth c = Cloth::gauze({PinLayout::kAll, {}});
  const Pattern p = circle_pattern(50.0, 100);
  const CutTrajectory t = plan(p, 6.0);
  const auto on_path = c.vertex(12, 18);  // material (76.2, 50.8), on the circle
  const std::vector<VertexId> cands{on_path, c.vertex(2, 2)};
  const auto factory = [&](VertexId g) { return EpisodeEnv(c, t, p, g); };
  const GraspSelection s = select_grasp(cands, factory, quick_cem());
  ASSERT_EQ(s.reports.size(), 2u);
  EXPECT_EQ(s.best.vertex, c.vertex(2, 2));
  const auto bad = std::find_if(s.reports.begin(), s.reports.end(), [&](auto& r) { return r.vertex == on_path; });
  EXPECT_FALSE(bad->ok);
  EXPECT_FALSE(bad->error.empty());
  const std::vector<VertexId> only_bad{on_path};
  EXPECT_THROW(select_grasp(only_bad, factory, quick_cem()), Error);
  std::ostringstream out;
  write_grasp_reports_csv(out, s.reports);
  EXPECT_EQ(out.str().rfind("vertex,mat_x,mat_y,score,reward_total,status\n", 0), 0u);
}

TEST(Select, DeterministicReports) {
  const Contrast sc;
  const std::vector<VertexId> cands{sc.far_v, sc.free_v};
  std::ostringstream a, b;
  write_grasp_reports_csv(a, select_grasp(cands, sc.factory(), quick_cem(5), 1).reports);
  write_grasp_reports_csv(b, select_grasp(cands, sc.factory(), quick_cem(5), 2).reports);
  EXPECT_EQ(a.str(), b.str());
}

}  // namespace
}  // namespace gauzecut
