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

// Scissors model: severing the cloth at a world point and driving a full cut
// episode while the tensioning gripper follows its policy.
//
// The cutting arm is position-controlled in the fixed world frame: waypoint n
// is placed at the world xy equal to its material coordinate (the flat cloth's
// rest placement) and lifted onto the current cloth surface. When the cloth is
// displaced the scissors land on a different material point, which is what the
// tension policy has to correct.

#pragma once

#include <iosfwd>
#include <optional>
#include <vector>

#include "gauzecut/cloth.hpp"
#include "gauzecut/common.hpp"
#include "gauzecut/pattern.hpp"
#include "gauzecut/tension.hpp"

namespace gauzecut {

struct CutEvent {
  int step_index = 0;
  Vec3 scissor_world = Vec3::Zero();
  /// Endpoints of the constraints this event cut (sorted, unique).
  std::vector<VertexId> severed_vertices;
  /// Material coordinate (mm) under the scissors, or none on a miss.
  std::optional<Vec2> material_point;
};

/// Cuts every uncut constraint whose current segment passes within `radius`
/// of `world_point`; at a vertex this is exactly that vertex's incident
/// constraints. The material point is found by inverting the deformed mesh
/// under the scissor's xy (intact triangles preferred, then the one nearest
/// in height), falling back to the nearest vertex. A point on a stretched
/// face farther than radius from every edge severs the face's nearest intact
/// edge. A miss (no vertex, constraint or face within radius) leaves the
/// cloth untouched.
CutEvent sever_at(Cloth& cloth, const Vec3& world_point, double radius, int step_index = 0);

/// Material coordinate (mm) of the cloth surface under world (x, y), choosing
/// among overlapping layers the one nearest to z_hint.
std::optional<Vec2> locate_material(const Cloth& cloth, const Vec2& world_xy, double z_hint);

/// Height of the topmost layer of the cloth above world (x, y), or the height
/// of the nearest vertex in xy when no triangle covers the point.
double surface_height(const Cloth& cloth, const Vec2& world_xy);

struct EpisodeConfig {
  double radius = 0.0;  // <= 0 selects spacing / 2
  int settle_steps = 20;
  double reward_tol_mm = 1.0;
};

struct EpisodeResult {
  std::vector<CutEvent> events;
  std::vector<int> rewards;
  std::vector<Vec2> intended;  // material mm
  std::vector<Displacement> displacements;
  Cloth final_state;

  int total_reward() const;
  /// Achieved material points in normalized coordinates, for scoring.
  std::vector<std::optional<Vec2>> achieved_normalized(double extent_mm) const;
};

/// Throws ConfigError for an empty trajectory, an unknown grasp vertex, or a
/// grasp within the cutting radius of the trajectory.
EpisodeResult run_cut_episode(const Cloth& state0, const CutTrajectory& trajectory,
                              const Pattern& pattern, const TensionPolicy& policy, VertexId grasp,
                              const EpisodeConfig& config = {});

/// CSV: step,intended_x,intended_y,achieved_x,achieved_y,reward (achieved
/// fields empty on a miss).
void write_episode_csv(std::ostream& out, const EpisodeResult& result);

}  // namespace gauzecut
