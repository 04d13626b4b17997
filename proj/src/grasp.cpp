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

#include "gauzecut/grasp.hpp"

#include <algorithm>
#include <ostream>

#include "gauzecut/geometry.hpp"
#include "gauzecut/parallel.hpp"
#include "gauzecut/rng.hpp"

namespace gauzecut {

std::vector<VertexId> eligible_vertices(const Cloth& cloth, const Pattern& pattern, double margin_mm,
                                        double extent_mm) {
  const std::vector<Vec2> line = pattern.scaled(extent_mm);
  std::vector<VertexId> out;
  for (std::size_t v = 0; v < cloth.vertex_count(); ++v) {
    const auto id = static_cast<VertexId>(v);
    if (cloth.is_pinned(id)) continue;
    if (point_polyline_distance(cloth.material(id), line, pattern.closed) > margin_mm) out.push_back(id);
  }
  return out;
}

std::vector<VertexId> sample_candidates(const Cloth& cloth, const Pattern& pattern, int k, double margin_mm,
                                        std::uint64_t seed, double extent_mm) {
  if (k < 1) throw ConfigError("sample_candidates: K must be >= 1");
  std::vector<VertexId> pool = eligible_vertices(cloth, pattern, margin_mm, extent_mm);
  if (static_cast<std::size_t>(k) > pool.size()) {
    throw ConfigError("sample_candidates: K = " + std::to_string(k) + " exceeds the " +
                      std::to_string(pool.size()) + " eligible vertices");
  }
  Rng rng(derive_seed(seed, "grasp"));
  for (int i = 0; i < k; ++i) {
    const std::size_t j = i + rng.below(pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(k);
  std::sort(pool.begin(), pool.end());
  return pool;
}

GraspSelection select_grasp(std::span<const VertexId> candidates, const EnvFactory& make_env,
                            const CemConfig& train, unsigned threads) {
  if (candidates.empty()) throw ConfigError("select_grasp: no candidates");
  std::vector<VertexId> ids(candidates.begin(), candidates.end());
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());

  GraspSelection sel;
  sel.reports.resize(ids.size());
  parallel_for(ids.size(), threads, [&](std::size_t i) {
    GraspCandidateReport& r = sel.reports[i];
    r.vertex = ids[i];
    try {
      const EpisodeEnv env = make_env(ids[i]);
      r.material = env.state0().material(ids[i]);
      CemConfig cfg = train;
      cfg.seed = derive_seed(train.seed, static_cast<std::uint64_t>(ids[i]));
      cfg.threads = 1;
      CemResult trained = cem_train(env, cfg);
      r.policy = std::move(trained.best);
      r.evaluation = trained.best_evaluation;
      r.ok = true;
    } catch (const std::exception& e) {
      r.ok = false;
      r.error = e.what();
    }
  });

  const GraspCandidateReport* best = nullptr;
  for (const auto& r : sel.reports) {
    if (!r.ok) continue;
    if (!best || r.evaluation.score.cells < best->evaluation.score.cells) best = &r;
  }
  if (!best) throw Error("select_grasp: every candidate failed; first error: " + sel.reports.front().error);
  sel.best = *best;
  return sel;
}

void write_grasp_reports_csv(std::ostream& out, const std::vector<GraspCandidateReport>& reports) {
  out.precision(17);
  out << "vertex,mat_x,mat_y,score,reward_total,status\n";
  for (const auto& r : reports) {
    out << r.vertex << ',' << r.material.x() << ',' << r.material.y() << ',';
    if (r.ok) {
      out << r.evaluation.score.normalized << ',' << r.evaluation.reward_total << ",ok\n";
    } else {
      std::string msg = r.error;
      std::replace(msg.begin(), msg.end(), ',', ';');
      std::replace(msg.begin(), msg.end(), '\n', ' ');
      out << ",,error: " << msg << '\n';
    }
  }
}

}  // namespace gauzecut
