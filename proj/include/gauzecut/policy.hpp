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

// Episode evaluation and cross-entropy policy search over time-indexed
// tensioning action sequences.

#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <vector>

#include "gauzecut/cloth.hpp"
#include "gauzecut/cutting.hpp"
#include "gauzecut/pattern.hpp"
#include "gauzecut/scoring.hpp"
#include "gauzecut/tension.hpp"

namespace gauzecut {

struct Evaluation {
  Score score;
  int reward_total = 0;
  double fitness = 0.0;
};

/// Anything the trainer can optimize an action sequence against. evaluate()
/// must be deterministic and safe to call concurrently.
class Objective {
 public:
  virtual ~Objective() = default;
  virtual std::size_t horizon() const = 0;
  virtual Evaluation evaluate(const std::vector<Action>& actions) const = 0;
};

/// A full simulated cut: fixed initial cloth, trajectory and grasp.
/// fitness = reward total - lambda * normalized symmetric difference, with
/// lambda = 10 N unless set.
class EpisodeEnv : public Objective {
 public:
  EpisodeEnv(Cloth state0, CutTrajectory trajectory, Pattern pattern, VertexId grasp,
             EpisodeConfig episode = {}, int d_max = kDefaultMaxDisplacementMm,
             int resolution = kDefaultResolution, double lambda = 0.0);

  std::size_t horizon() const override { return trajectory_.size(); }
  Evaluation evaluate(const std::vector<Action>& actions) const override;

  EpisodeResult run(const TensionPolicy& policy) const;
  Evaluation score(const EpisodeResult& result) const;
  TensionPolicy policy(std::vector<Action> actions) const;

  const Cloth& state0() const { return state0_; }
  const CutTrajectory& trajectory() const { return trajectory_; }
  const Pattern& pattern() const { return pattern_; }
  VertexId grasp() const { return grasp_; }
  int d_max() const { return d_max_; }
  double lambda() const { return lambda_; }
  const RegionMask& intended_mask() const { return intended_; }

 private:
  Cloth state0_;
  CutTrajectory trajectory_;
  Pattern pattern_;
  VertexId grasp_;
  EpisodeConfig episode_;
  int d_max_;
  int resolution_;
  double lambda_;
  std::vector<std::size_t> trace_order_;
  RegionMask intended_;
};

/// Runs one episode with `policy` (its grasp and d_max are overridden by the
/// environment's).
Evaluation evaluate(const TensionPolicy& policy, const EpisodeEnv& env);

struct CemConfig {
  int iterations = 30;
  int population = 64;
  double elite_fraction = 0.125;
  double smoothing = 0.05;
  std::uint64_t seed = 1;
  unsigned threads = 1;
  /// Adds the all-stay sequence to the first iteration's population.
  bool inject_baseline = true;

  void validate() const;
};

struct CemLogRow {
  int iteration = 0;
  double best_fitness = 0.0;  // best ever so far
  double mean_fitness = 0.0;  // this iteration's population
  double best_score = 0.0;    // normalized score of the best-ever sequence
};

struct CemResult {
  std::vector<Action> best;
  Evaluation best_evaluation;
  std::vector<CemLogRow> log;
  /// Final per-step categorical distributions, indexed by Action.
  std::vector<std::array<double, kActionCount>> distribution;
};

CemResult cem_train(const Objective& objective, const CemConfig& config);

/// CSV: iteration,best_fitness,mean_fitness,best_score.
void write_training_log_csv(std::ostream& out, const std::vector<CemLogRow>& log);

}  // namespace gauzecut
