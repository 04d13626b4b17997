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

#include "gauzecut/cloth.hpp"
#include "gauzecut/cutting.hpp"
#include "gauzecut/pattern.hpp"
#include "gauzecut/rng.hpp"
#include "gauzecut/tension.hpp"

namespace gauzecut {
namespace {

ClothParams zero_gravity() {
  ClothParams p;
  p.gravity = Vec3::Zero();
  return p;
}

CutTrajectory line_trajectory(const Pattern& p, double step) {
  const auto segs = split_segments(p, find_notches(p, 60.0 * kDegToRad));
  std::vector<DirectedSegment> order;
  for (std::size_t i = 0; i < segs.size(); ++i) order.push_back({i, false});
  return build_trajectory(segs, order, step);
}

bool same_events(const EpisodeResult& a, const EpisodeResult& b) {
  if (a.events.size() != b.events.size() || a.rewards != b.rewards) return false;
  for (std::size_t i = 0; i < a.events.size(); ++i) {
    if (a.events[i].scissor_world != b.events[i].scissor_world) return false;
    if (a.events[i].severed_vertices != b.events[i].severed_vertices) return false;
    if (a.events[i].material_point != b.events[i].material_point) return false;
  }
  for (std::size_t v = 0; v < a.final_state.vertex_count(); ++v) {
    if (a.final_state.position(v) != b.final_state.position(v)) return false;
  }
  return true;
}

TEST(Sever, FarPointMissesAndLeavesClothUntouched) {
  Cloth c = Cloth::gauze({});
  const CutEvent e = sever_at(c, Vec3(500, 500, 0), 0.5 * c.spacing(), 3);
  EXPECT_FALSE(e.material_point.has_value());
  EXPECT_TRUE(e.severed_vertices.empty());
  EXPECT_EQ(e.step_index, 3);
  EXPECT_EQ(c.cut_count(), 0u);
  EXPECT_THROW(sever_at(c, Vec3::Zero(), 0.0), ConfigError);
}

TEST(Sever, InteriorVertexCutsItsFourConstraints) {
  Cloth c = Cloth::gauze({});
  const VertexId v = c.vertex(10, 7);
  const CutEvent e = sever_at(c, c.position(v), 0.5 * c.spacing());
  ASSERT_TRUE(e.material_point.has_value());
  EXPECT_TRUE(e.material_point->isApprox(c.material(v), 1e-12));
  EXPECT_EQ(c.cut_degree(v), 4);
  EXPECT_EQ(c.cut_count(), 4u);
  const std::vector<VertexId> expected{c.vertex(9, 7), c.vertex(10, 6), v, c.vertex(10, 8), c.vertex(11, 7)};
  std::vector<VertexId> sorted = expected;
  std::sort(sorted.begin(), sorted.end());
  EXPECT_EQ(e.severed_vertices, sorted);
}

TEST(Sever, MaterialPointOnDeformedMeshIsWithinOneSpacing) {
  Cloth c = Cloth::gauze({PinLayout::kBoundary, {}}, zero_gravity());
  const VertexId grasp = c.vertex(6, 6);
  c.set_pin(grasp, c.position(grasp) + Vec3(5.0, 0.0, 0.0));
  c.step(2000);
  Rng rng(9);
  for (int trial = 0; trial < 40; ++trial) {
    const int r = 3 + static_cast<int>(rng.below(18));
    const int col = 3 + static_cast<int>(rng.below(18));
    const VertexId a = c.vertex(r, col), b = c.vertex(r, col + 1), d = c.vertex(r + 1, col + 1);
    const double l1 = rng.uniform(0.0, 0.5), l2 = rng.uniform(0.0, 0.5);
    const double l0 = 1.0 - l1 - l2;
    const Vec2 m = l0 * c.material(a) + l1 * c.material(b) + l2 * c.material(d);
    const Vec3 world = l0 * c.position(a) + l1 * c.position(b) + l2 * c.position(d);
    Cloth copy = c;
    const CutEvent e = sever_at(copy, world, 0.5 * c.spacing());
    ASSERT_TRUE(e.material_point.has_value());
    EXPECT_LT((*e.material_point - m).norm(), c.spacing());
  }
}

TEST(Sever, DamageIsMonotone) {
  Cloth c = Cloth::gauze({}, zero_gravity());
  Rng rng(13);
  std::vector<bool> prev(c.constraints().size(), false);
  for (int k = 0; k < 60; ++k) {
    sever_at(c, Vec3(rng.uniform(0, 101.6), rng.uniform(0, 101.6), 0.0), 0.5 * c.spacing());
    const auto cons = c.constraints();
    for (std::size_t i = 0; i < cons.size(); ++i) {
      ASSERT_TRUE(!prev[i] || cons[i].cut);
      prev[i] = cons[i].cut;
    }
  }
}

TEST(Sever, SurfaceHeightFollowsTheSag) {
  Cloth c = Cloth::gauze({});
  c.step(2000);
  const VertexId v = c.vertex(12, 12);
  EXPECT_NEAR(surface_height(c, c.position(v).head<2>()), c.position(v).z(), 1e-9);
  const auto m = locate_material(c, c.position(v).head<2>(), c.position(v).z());
  ASSERT_TRUE(m.has_value());
  EXPECT_LT((*m - c.material(v)).norm(), 1e-9);
}

TEST(Episode, FlatBoundaryPinnedLineRewardsEveryCut) {
  const Cloth c = Cloth::gauze({PinLayout::kBoundary, {}}, zero_gravity());
  const Pattern p = make_pattern({Vec2(0.2, 0.5), Vec2(0.8, 0.5)});
  const CutTrajectory t = line_trajectory(p, 2.0);
  const VertexId grasp = c.vertex(4, 4);
  const EpisodeResult r = run_cut_episode(c, t, p, no_tension(t.size(), grasp), grasp);
  ASSERT_EQ(r.events.size(), t.size());
  for (std::size_t i = 0; i < t.size(); ++i) {
    ASSERT_TRUE(r.events[i].material_point.has_value());
    EXPECT_LT((*r.events[i].material_point - t.flat[i]).norm(), 1e-6);
    EXPECT_EQ(r.rewards[i], 1);
  }
  EXPECT_EQ(r.total_reward(), static_cast<int>(t.size()));
  for (const Displacement& d : r.displacements) EXPECT_EQ(d, Displacement{});
}

TEST(Episode, EmptyPolicyEqualsNoTension) {
  Cloth c = Cloth::gauze({});
  c.step(500);
  const Pattern p = circle_pattern(50.0, 100);
  const CutTrajectory t = line_trajectory(p, 6.0);
  const VertexId grasp = c.vertex(3, 20);
  TensionPolicy empty;
  const EpisodeResult a = run_cut_episode(c, t, p, empty, grasp);
  const EpisodeResult b = run_cut_episode(c, t, p, no_tension(t.size(), grasp), grasp);
  EXPECT_TRUE(same_events(a, b));
}

TEST(Episode, DeterministicForIdenticalInputs) {
  Cloth c = Cloth::gauze({});
  c.step(500);
  const Pattern p = circle_pattern(50.0, 100);
  const CutTrajectory t = line_trajectory(p, 6.0);
  const VertexId grasp = c.vertex(3, 20);
  TensionPolicy pol = orthogonal_tension(t, 5.0, grasp);
  const EpisodeResult a = run_cut_episode(c, t, p, pol, grasp);
  const EpisodeResult b = run_cut_episode(c, t, p, pol, grasp);
  EXPECT_TRUE(same_events(a, b));
  std::ostringstream sa, sb;
  write_episode_csv(sa, a);
  write_episode_csv(sb, b);
  EXPECT_EQ(sa.str(), sb.str());
  EXPECT_EQ(sa.str().rfind("step,intended_x,intended_y,achieved_x,achieved_y,reward\n", 0), 0u);
}

TEST(Episode, AllPinnedClothTracesTheIntentionUnderAnyPolicy) {
  const Cloth c = Cloth::gauze({PinLayout::kAll, {}}, zero_gravity());
  const Pattern p = circle_pattern(50.0, 100);
  const CutTrajectory t = line_trajectory(p, 2.0);
  const VertexId grasp = c.vertex(2, 2);
  Rng rng(31);
  for (int trial = 0; trial < 3; ++trial) {
    TensionPolicy pol;
    for (std::size_t i = 0; i < t.size(); ++i) pol.actions.push_back(kAllActions[rng.below(kActionCount)]);
    const EpisodeResult r = run_cut_episode(c, t, p, pol, grasp);
    for (std::size_t i = 0; i < t.size(); ++i) {
      ASSERT_TRUE(r.events[i].material_point.has_value());
      EXPECT_LE((*r.events[i].material_point - t.flat[i]).norm(), 0.5 * c.spacing());
    }
  }
}

TEST(Episode, GraspOnTheTrajectoryIsRejected) {
  const Cloth c = Cloth::gauze({});
  const Pattern p = make_pattern({Vec2(0.0, 0.5), Vec2(1.0, 0.5)});
  const CutTrajectory t = line_trajectory(p, 2.0);
  EXPECT_THROW(run_cut_episode(c, t, p, {}, c.vertex(12, 5)), ConfigError);
  EXPECT_THROW(run_cut_episode(c, t, p, {}, 100000), ConfigError);
  EXPECT_THROW(run_cut_episode(c, CutTrajectory{}, p, {}, 0), ConfigError);
}

TEST(Episode, DisplacementNeverExceedsBound) {
  Cloth c = Cloth::gauze({});
  const Pattern p = circle_pattern(50.0, 100);
  const CutTrajectory t = line_trajectory(p, 4.0);
  const VertexId grasp = c.vertex(2, 22);
  TensionPolicy pol;
  pol.actions.assign(t.size(), Action::kPlusX);
  const EpisodeResult r = run_cut_episode(c, t, p, pol, grasp);
  for (const Displacement& d : r.displacements) EXPECT_LE(d.x, kDefaultMaxDisplacementMm);
  EXPECT_EQ(r.displacements.back().x, kDefaultMaxDisplacementMm);
  EXPECT_TRUE(r.final_state.position(grasp).isApprox(c.position(grasp) + Vec3(15, 0, 0)));
}

}  // namespace
}  // namespace gauzecut
