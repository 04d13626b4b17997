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

// Grasp point selection: sample candidate vertices away from the pattern,
// train a tensioning policy for each and keep the best scoring one.

#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "gauzecut/cloth.hpp"
#include "gauzecut/pattern.hpp"
#include "gauzecut/policy.hpp"

namespace gauzecut {

inline constexpr int kDefaultGraspCandidates = 20;
inline constexpr double kDefaultGraspMarginMm = 5.0;

/// Unpinned vertices whose material point is farther than margin_mm from the
/// pattern polyline, in increasing id order.
std::vector<VertexId> eligible_vertices(const Cloth& cloth, const Pattern& pattern, double margin_mm,
                                        double extent_mm = kGauzeSideMm);

/// k distinct eligible vertices drawn uniformly without replacement, sorted.
/// Throws ConfigError when k < 1 or k exceeds the eligible count.
std::vector<VertexId> sample_candidates(const Cloth& cloth, const Pattern& pattern, int k, double margin_mm,
                                        std::uint64_t seed, double extent_mm = kGauzeSideMm);

struct GraspCandidateReport {
  VertexId vertex = 0;
  Vec2 material = Vec2::Zero();
  std::vector<Action> policy;
  Evaluation evaluation;
  bool ok = false;
  std::string error;
};

struct GraspSelection {
  GraspCandidateReport best;
  std::vector<GraspCandidateReport> reports;  // sorted by vertex id
};

using EnvFactory = std::function<EpisodeEnv(VertexId grasp)>;

/// Trains a policy per candidate (seed derived from train.seed and the vertex
/// id) and returns the lowest symmetric difference, ties to the lowest id.
/// A failing candidate is recorded and skipped; throws only when every
/// candidate fails. Candidates run concurrently on `threads` workers.
GraspSelection select_grasp(std::span<const VertexId> candidates, const EnvFactory& make_env,
                            const CemConfig& train, unsigned threads = 1);

/// CSV: vertex,mat_x,mat_y,score,reward_total,status.
void write_grasp_reports_csv(std::ostream& out, const std::vector<GraspCandidateReport>& reports);

}  // namespace gauzecut
