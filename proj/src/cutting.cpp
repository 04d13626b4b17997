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

#include "gauzecut/cutting.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "gauzecut/geometry.hpp"

namespace gauzecut {
namespace {

bool edge_intact(const Cloth& cloth, VertexId a, VertexId b) {
  const auto cons = cloth.constraints();
  for (std::uint32_t ci : cloth.incident(a)) {
    const Constraint& c = cons[ci];
    if ((c.a == a && c.b == b) || (c.a == b && c.b == a)) return !c.cut;
  }
  return true;  // not a constraint (e.g. an unused diagonal)
}

struct Hit {
  Vec3 bary;
  double z;
  bool intact;
  VertexId v[3];
};

// Visits every triangle of the grid whose xy projection contains p.
template <typename Fn>
void for_each_covering(const Cloth& cloth, const std::vector<Vec3>& pos, const Vec2& p, Fn&& fn) {
  const int rows = cloth.rows(), cols = cloth.cols();
  for (int r = 0; r + 1 < rows; ++r) {
    for (int c = 0; c + 1 < cols; ++c) {
      const VertexId v00 = cloth.vertex(r, c), v01 = cloth.vertex(r, c + 1);
      const VertexId v10 = cloth.vertex(r + 1, c), v11 = cloth.vertex(r + 1, c + 1);
      const VertexId tris[2][3] = {{v00, v01, v11}, {v00, v11, v10}};
      for (const auto& t : tris) {
        const Vec3& a = pos[t[0]];
        const Vec3& b = pos[t[1]];
        const Vec3& q = pos[t[2]];
        const double x0 = a.x(), y0 = a.y();
        const double det = (b.x() - x0) * (q.y() - y0) - (q.x() - x0) * (b.y() - y0);
        if (std::abs(det) < 1e-14) continue;
        const double l1 = ((p.x() - x0) * (q.y() - y0) - (q.x() - x0) * (p.y() - y0)) / det;
        const double l2 = ((b.x() - x0) * (p.y() - y0) - (p.x() - x0) * (b.y() - y0)) / det;
        const double l0 = 1.0 - l1 - l2;
        constexpr double eps = -1e-12;
        if (l0 < eps || l1 < eps || l2 < eps) continue;
        Hit h;
        h.bary = Vec3(l0, l1, l2);
        h.z = l0 * a.z() + l1 * b.z() + l2 * q.z();
        h.v[0] = t[0];
        h.v[1] = t[1];
        h.v[2] = t[2];
        h.intact = true;
        fn(h);
      }
    }
  }
}

VertexId nearest_vertex(const std::vector<Vec3>& pos, const Vec3& p) {
  VertexId best = 0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < pos.size(); ++v) {
    const double dv = (pos[v] - p).squaredNorm();
    if (dv < d) {
      d = dv;
      best = static_cast<VertexId>(v);
    }
  }
  return best;
}

struct Located {
  Vec2 material;
  double z;
  bool intact;
  VertexId v[3];
};

std::optional<Located> locate_in(const Cloth& cloth, const std::vector<Vec3>& pos, const Vec2& xy, double z_hint) {
  std::optional<Hit> best;
  double best_dz = std::numeric_limits<double>::infinity();
  for_each_covering(cloth, pos, xy, [&](Hit h) {
    h.intact = edge_intact(cloth, h.v[0], h.v[1]) && edge_intact(cloth, h.v[1], h.v[2]) &&
               edge_intact(cloth, h.v[0], h.v[2]);
    const double dz = std::abs(h.z - z_hint);
    const bool better = !best || (h.intact && !best->intact) || (h.intact == best->intact && dz < best_dz);
    if (better) {
      best = h;
      best_dz = dz;
    }
  });
  if (!best) return std::nullopt;
  Vec2 m = Vec2::Zero();
  for (int k = 0; k < 3; ++k) m += best->bary[k] * cloth.material(best->v[k]);
  Located out;
  out.material = Vec2(std::clamp(m.x(), 0.0, cloth.width()), std::clamp(m.y(), 0.0, cloth.height()));
  out.z = best->z;
  out.intact = best->intact;
  for (int k = 0; k < 3; ++k) out.v[k] = best->v[k];
  return out;
}

}  // namespace

std::optional<Vec2> locate_material(const Cloth& cloth, const Vec2& world_xy, double z_hint) {
  const auto hit = locate_in(cloth, cloth.positions(), world_xy, z_hint);
  if (!hit) return std::nullopt;
  return hit->material;
}

double surface_height(const Cloth& cloth, const Vec2& world_xy) {
  const std::vector<Vec3> pos = cloth.positions();
  double top = -std::numeric_limits<double>::infinity();
  for_each_covering(cloth, pos, world_xy, [&](const Hit& h) { top = std::max(top, h.z); });
  if (std::isfinite(top)) return top;
  VertexId best = 0;
  double d = std::numeric_limits<double>::infinity();
  for (std::size_t v = 0; v < pos.size(); ++v) {
    const double dv = (pos[v].head<2>() - world_xy).squaredNorm();
    if (dv < d) {
      d = dv;
      best = static_cast<VertexId>(v);
    }
  }
  return pos.empty() ? 0.0 : pos[best].z();
}

CutEvent sever_at(Cloth& cloth, const Vec3& world_point, double radius, int step_index) {
  if (!(radius > 0.0)) throw ConfigError("sever_at: radius must be > 0");
  CutEvent event;
  event.step_index = step_index;
  event.scissor_world = world_point;
  const std::vector<Vec3> pos = cloth.positions();

  bool touched = false;
  for (const Vec3& p : pos) {
    if ((p - world_point).norm() <= radius) {
      touched = true;
      break;
    }
  }
  std::vector<std::size_t> to_cut;
  const auto cons = cloth.constraints();
  for (std::size_t i = 0; i < cons.size(); ++i) {
    const double d = point_segment_distance(world_point, pos[cons[i].a], pos[cons[i].b]);
    if (d > radius) continue;
    touched = true;
    if (!cons[i].cut) to_cut.push_back(i);
  }

  // Locate before cutting so the intact-triangle preference sees the cloth
  // the scissors closed on.
  const auto hit = locate_in(cloth, pos, world_point.head<2>(), world_point.z());
  const bool on_face = hit && std::abs(hit->z - world_point.z()) <= radius;
  if (!touched && !on_face) return event;
  event.material_point = hit ? hit->material : cloth.material(nearest_vertex(pos, world_point));

  if (to_cut.empty() && on_face) {
    // Inside a stretched face, farther than radius from every edge: the
    // blades still close on the face, so sever its nearest intact edge.
    double best = std::numeric_limits<double>::infinity();
    std::size_t pick = cons.size();
    for (int k = 0; k < 3; ++k) {
      const VertexId a = hit->v[k], b = hit->v[(k + 1) % 3];
      for (std::uint32_t ci : cloth.incident(a)) {
        const Constraint& c = cons[ci];
        if (c.cut || !((c.a == a && c.b == b) || (c.a == b && c.b == a))) continue;
        const double d = point_segment_distance(world_point, pos[a], pos[b]);
        if (d < best) {
          best = d;
          pick = ci;
        }
      }
    }
    if (pick < cons.size()) to_cut.push_back(pick);
  }

  for (std::size_t i : to_cut) {
    cloth.cut_constraint(i);
    event.severed_vertices.push_back(cons[i].a);
    event.severed_vertices.push_back(cons[i].b);
  }
  std::sort(event.severed_vertices.begin(), event.severed_vertices.end());
  event.severed_vertices.erase(std::unique(event.severed_vertices.begin(), event.severed_vertices.end()),
                               event.severed_vertices.end());
  return event;
}

int EpisodeResult::total_reward() const {
  int sum = 0;
  for (int r : rewards) sum += r;
  return sum;
}

std::vector<std::optional<Vec2>> EpisodeResult::achieved_normalized(double extent_mm) const {
  std::vector<std::optional<Vec2>> out;
  out.reserve(events.size());
  for (const CutEvent& e : events) {
    if (e.material_point) {
      out.emplace_back(*e.material_point / extent_mm);
    } else {
      out.emplace_back(std::nullopt);
    }
  }
  return out;
}

EpisodeResult run_cut_episode(const Cloth& state0, const CutTrajectory& trajectory, const Pattern& pattern,
                              const TensionPolicy& policy, VertexId grasp, const EpisodeConfig& config) {
  if (trajectory.flat.empty()) throw ConfigError("run_cut_episode: empty trajectory");
  if (grasp >= state0.vertex_count()) throw ConfigError("run_cut_episode: grasp vertex out of range");
  if (config.settle_steps < 0) throw ConfigError("run_cut_episode: settle_steps must be >= 0");
  const double radius = config.radius > 0.0 ? config.radius : 0.5 * state0.spacing();
  for (const Segment& seg : trajectory.segments) {
    if (point_polyline_distance(state0.material(grasp), seg, false) <= radius) {
      throw ConfigError("run_cut_episode: grasp vertex " + std::to_string(grasp) + " lies on the trajectory");
    }
  }

  EpisodeResult result;
  result.final_state = state0;
  Cloth& cloth = result.final_state;
  const Vec3 anchor = cloth.position(grasp);
  cloth.set_pin(grasp, anchor);

  const std::size_t n = trajectory.flat.size();
  result.events.reserve(n);
  result.rewards.reserve(n);
  result.intended = trajectory.flat;
  result.displacements.reserve(n);
  Displacement d;
  for (std::size_t i = 0; i < n; ++i) {
    apply_action(d, policy.at(i), policy.d_max);
    result.displacements.push_back(d);
    cloth.set_pin(grasp, anchor + Vec3(d.x, d.y, 0.0));
    cloth.step(config.settle_steps);

    const Vec2& xy = trajectory.flat[i];
    const Vec3 scissor(xy.x(), xy.y(), surface_height(cloth, xy));
    CutEvent e = sever_at(cloth, scissor, radius, static_cast<int>(i));
    result.rewards.push_back(reward(e.material_point, pattern, trajectory.extent_mm, config.reward_tol_mm));
    result.events.push_back(std::move(e));
  }
  return result;
}

void write_episode_csv(std::ostream& out, const EpisodeResult& result) {
  out.precision(17);
  out << "step,intended_x,intended_y,achieved_x,achieved_y,reward\n";
  for (std::size_t i = 0; i < result.events.size(); ++i) {
    const auto& e = result.events[i];
    out << i << ',' << result.intended[i].x() << ',' << result.intended[i].y() << ',';
    if (e.material_point) {
      out << e.material_point->x() << ',' << e.material_point->y();
    } else {
      out << ',';
    }
    out << ',' << result.rewards[i] << '\n';
  }
}

}  // namespace gauzecut
