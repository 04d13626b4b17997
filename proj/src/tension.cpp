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

#include "gauzecut/tension.hpp"

#include <cmath>
#include <cstdlib>
#include <istream>
#include <ostream>
#include <sstream>

#include "gauzecut/geometry.hpp"
#include "gauzecut/pattern.hpp"

namespace gauzecut {
namespace {

Displacement delta(Action a) {
  switch (a) {
    case Action::kPlusX: return {1, 0};
    case Action::kMinusX: return {-1, 0};
    case Action::kPlusY: return {0, 1};
    case Action::kMinusY: return {0, -1};
    case Action::kStay: break;
  }
  return {0, 0};
}

}  // namespace

std::string_view action_token(Action a) {
  switch (a) {
    case Action::kPlusX: return "+x";
    case Action::kMinusX: return "-x";
    case Action::kPlusY: return "+y";
    case Action::kMinusY: return "-y";
    case Action::kStay: return "stay";
  }
  return "stay";
}

Action parse_action(std::string_view token) {
  for (Action a : kAllActions) {
    if (action_token(a) == token) return a;
  }
  throw ConfigError("unknown action token '" + std::string(token) + "'");
}

Action apply_action(Displacement& d, Action a, int d_max) {
  const Displacement s = delta(a);
  const Displacement next{d.x + s.x, d.y + s.y};
  if (std::abs(next.x) > d_max || std::abs(next.y) > d_max) return Action::kStay;
  d = next;
  return a;
}

TensionPolicy no_tension(std::size_t horizon, VertexId grasp) {
  TensionPolicy p;
  p.actions.assign(horizon, Action::kStay);
  p.grasp = grasp;
  return p;
}

TensionPolicy orthogonal_tension(const CutTrajectory& trajectory, double magnitude_mm,
                                 VertexId grasp, int d_max) {
  if (!(magnitude_mm >= 0.0) || magnitude_mm > d_max) {
    throw ConfigError("orthogonal_tension: magnitude must lie in [0, d_max]");
  }
  const auto& pts = trajectory.flat;
  const std::size_t n = pts.size();
  TensionPolicy p;
  p.grasp = grasp;
  p.d_max = d_max;
  Displacement d;
  for (std::size_t i = 0; i < n; ++i) {
    // Central difference within the segment, one-sided at its ends.
    const std::size_t seg = trajectory.segment_of(i);
    const std::size_t lo = trajectory.notch_indices[seg];
    const std::size_t hi = seg + 1 < trajectory.notch_indices.size() ? trajectory.notch_indices[seg + 1] : n;
    const std::size_t a = i > lo ? i - 1 : i;
    const std::size_t b = i + 1 < hi ? i + 1 : i;
    Vec2 tangent = pts[b] - pts[a];
    Action chosen = Action::kStay;
    if (tangent.norm() > 0.0) {
      tangent.normalize();
      const Vec2 target = magnitude_mm * Vec2(-tangent.y(), tangent.x());
      const Vec2 cur(d.x, d.y);
      double best = (target - cur).norm();
      for (Action cand : kAllActions) {
        if (cand == Action::kStay) continue;
        const Displacement s = delta(cand);
        const Vec2 next(d.x + s.x, d.y + s.y);
        if (next.norm() > magnitude_mm + 1e-12) continue;
        const double dist = (target - next).norm();
        if (dist < best - 1e-12) {
          best = dist;
          chosen = cand;
        }
      }
    }
    chosen = apply_action(d, chosen, d_max);
    p.actions.push_back(chosen);
  }
  return p;
}

std::vector<Displacement> displacement_trace(const TensionPolicy& policy, std::size_t horizon) {
  std::vector<Displacement> out;
  out.reserve(horizon);
  Displacement d;
  for (std::size_t i = 0; i < horizon; ++i) {
    apply_action(d, policy.at(i), policy.d_max);
    out.push_back(d);
  }
  return out;
}

int reward(const std::optional<Vec2>& material_point, const Pattern& pattern, double extent_mm,
           double tol_mm) {
  if (!material_point) return 0;
  const std::vector<Vec2> line = pattern.scaled(extent_mm);
  return point_polyline_distance(*material_point, line, pattern.closed) <= tol_mm ? 1 : 0;
}

void write_policy(std::ostream& out, const TensionPolicy& policy) {
  out << "grasp " << policy.grasp << '\n' << "d_max " << policy.d_max << '\n';
  for (Action a : policy.actions) out << action_token(a) << '\n';
}

TensionPolicy read_policy(std::istream& in) {
  TensionPolicy p;
  std::string key;
  long long grasp = -1;
  if (!(in >> key >> grasp) || key != "grasp" || grasp < 0) throw ConfigError("policy: missing 'grasp <id>' header");
  if (!(in >> key >> p.d_max) || key != "d_max" || p.d_max < 0) throw ConfigError("policy: missing 'd_max <mm>' header");
  p.grasp = static_cast<VertexId>(grasp);
  std::string token;
  while (in >> token) p.actions.push_back(parse_action(token));
  return p;
}

}  // namespace gauzecut
