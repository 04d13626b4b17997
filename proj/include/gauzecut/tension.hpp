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

// Tensioning actions, time-indexed policies and the per-cut reward.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "gauzecut/common.hpp"

namespace gauzecut {

struct Pattern;
struct CutTrajectory;

enum class Action : std::uint8_t { kPlusX = 0, kMinusX, kPlusY, kMinusY, kStay };
inline constexpr int kActionCount = 5;
inline constexpr std::array<Action, kActionCount> kAllActions = {
    Action::kPlusX, Action::kMinusX, Action::kPlusY, Action::kMinusY, Action::kStay};

inline constexpr int kDefaultMaxDisplacementMm = 15;

std::string_view action_token(Action a);
/// Accepts the tokens produced by action_token; throws ConfigError otherwise.
Action parse_action(std::string_view token);

/// Integer millimetre offset of the grasp from where it started.
struct Displacement {
  int x = 0;
  int y = 0;
  bool operator==(const Displacement&) const = default;
};

/// Applies a 1 mm move unless it would push a component beyond d_max, in
/// which case the move becomes stay. Returns the action actually taken.
Action apply_action(Displacement& d, Action a, int d_max);

/// Open-loop, time-indexed policy. Steps past the end of the table stay.
struct TensionPolicy {
  std::vector<Action> actions;
  VertexId grasp = 0;
  int d_max = kDefaultMaxDisplacementMm;

  Action at(std::size_t n) const { return n < actions.size() ? actions[n] : Action::kStay; }
};

TensionPolicy no_tension(std::size_t horizon, VertexId grasp = 0);

/// Steps 1 mm toward magnitude * left normal of the local trajectory tangent,
/// re-evaluated each step; a step is taken only when it brings the
/// displacement closer to that target and keeps |d| <= magnitude.
TensionPolicy orthogonal_tension(const CutTrajectory& trajectory, double magnitude_mm,
                                 VertexId grasp = 0, int d_max = kDefaultMaxDisplacementMm);

/// Displacement after each step of the policy (entry n is after action n).
std::vector<Displacement> displacement_trace(const TensionPolicy& policy, std::size_t horizon);

/// 1 when the material point (mm) lies within tol_mm of the pattern polyline
/// scaled to extent_mm; 0 otherwise or when the cut missed.
int reward(const std::optional<Vec2>& material_point, const Pattern& pattern,
           double extent_mm = kGauzeSideMm, double tol_mm = 1.0);

/// Header lines "grasp <id>" and "d_max <mm>", then one action token per line.
void write_policy(std::ostream& out, const TensionPolicy& policy);
TensionPolicy read_policy(std::istream& in);

}  // namespace gauzecut
