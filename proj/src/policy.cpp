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

#include "gauzecut/policy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <ostream>

#include "gauzecut/parallel.hpp"
#include "gauzecut/rng.hpp"

namespace gauzecut {

EpisodeEnv::EpisodeEnv(Cloth state0, CutTrajectory trajectory, Pattern pattern, VertexId grasp,
                       EpisodeConfig episode, int d_max, int resolution, double lambda)
    : state0_(std::move(state0)),
      trajectory_(std::move(trajectory)),
      pattern_(std::move(pattern)),
      grasp_(grasp),
      episode_(episode),
      d_max_(d_max),
      resolution_(resolution),
      lambda_(lambda > 0.0 ? lambda : 10.0 * static_cast<double>(trajectory_.size())) {
  if (trajectory_.flat.empty()) throw ConfigError("EpisodeEnv: empty trajectory");
  if (d_max_ < 0) throw ConfigError("EpisodeEnv: d_max must be >= 0");
  trace_order_ = trajectory_.pattern_order();
  std::vector<Vec2> intended;
  intended.reserve(trace_order_.size());
  for (std::size_t i : trace_order_) intended.push_back(trajectory_.flat[i] / trajectory_.extent_mm);
  intended_ = rasterize(close_curve(intended, pattern_.closed), resolution_);
}

TensionPolicy EpisodeEnv::policy(std::vector<Action> actions) const {
  TensionPolicy p;
  p.actions = std::move(actions);
  p.grasp = grasp_;
  p.d_max = d_max_;
  return p;
}

EpisodeResult EpisodeEnv::run(const TensionPolicy& policy) const {
  TensionPolicy p = policy;
  p.grasp = grasp_;
  p.d_max = d_max_;
  return run_cut_episode(state0_, trajectory_, pattern_, p, grasp_, episode_);
}

Evaluation EpisodeEnv::score(const EpisodeResult& result) const {
  const auto achieved = result.achieved_normalized(trajectory_.extent_mm);
  std::vector<std::optional<Vec2>> trace;
  trace.reserve(trace_order_.size());
  for (std::size_t i : trace_order_) trace.push_back(achieved[i]);
  Evaluation e;
  e.score = symmetric_difference(intended_, achieved_region(trace, pattern_.closed, resolution_));
  e.reward_total = result.total_reward();
  e.fitness = e.reward_total - lambda_ * e.score.normalized;
  return e;
}

Evaluation EpisodeEnv::evaluate(const std::vector<Action>& actions) const {
  return score(run(policy(actions)));
}

Evaluation evaluate(const TensionPolicy& policy, const EpisodeEnv& env) {
  return env.score(env.run(policy));
}

void CemConfig::validate() const {
  if (iterations < 1) throw ConfigError("cem: iterations must be >= 1");
  if (population < 1) throw ConfigError("cem: population must be >= 1");
  if (!(elite_fraction > 0.0 && elite_fraction <= 1.0)) throw ConfigError("cem: elite_fraction must lie in (0, 1]");
  if (population < 2 && elite_fraction != 1.0) {
    throw ConfigError("cem: population must be >= 2 unless elite_fraction = 1");
  }
  if (!(smoothing >= 0.0)) throw ConfigError("cem: smoothing must be >= 0");
}

CemResult cem_train(const Objective& objective, const CemConfig& config) {
  config.validate();
  const std::size_t horizon = objective.horizon();
  if (horizon == 0) throw ConfigError("cem: objective has zero horizon");

  CemResult result;
  result.distribution.assign(horizon, {});
  for (auto& p : result.distribution) p.fill(1.0 / kActionCount);
  Rng rng(derive_seed(config.seed, "cem"));
  bool have_best = false;

  for (int it = 0; it < config.iterations; ++it) {
    std::vector<std::vector<Action>> members;
    members.reserve(static_cast<std::size_t>(config.population) + 1);
    for (int m = 0; m < config.population; ++m) {
      std::vector<Action> seq(horizon);
      for (std::size_t n = 0; n < horizon; ++n) {
        const double u = rng.uniform();
        double acc = 0.0;
        int pick = kActionCount - 1;
        for (int a = 0; a < kActionCount; ++a) {
          acc += result.distribution[n][a];
          if (u < acc) {
            pick = a;
            break;
          }
        }
        seq[n] = static_cast<Action>(pick);
      }
      members.push_back(std::move(seq));
    }
    if (it == 0 && config.inject_baseline) members.emplace_back(horizon, Action::kStay);

    std::vector<Evaluation> evals(members.size());
    parallel_for(members.size(), config.threads, [&](std::size_t i) { evals[i] = objective.evaluate(members[i]); });

    double sum = 0.0;
    for (std::size_t i = 0; i < members.size(); ++i) {
      sum += evals[i].fitness;
      if (!have_best || evals[i].fitness > result.best_evaluation.fitness) {
        have_best = true;
        result.best = members[i];
        result.best_evaluation = evals[i];
      }
    }

    std::vector<std::size_t> rank(members.size());
    std::iota(rank.begin(), rank.end(), 0);
    std::stable_sort(rank.begin(), rank.end(),
                     [&](std::size_t a, std::size_t b) { return evals[a].fitness > evals[b].fitness; });
    const auto n_elite = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::ceil(config.elite_fraction * config.population - 1e-9)));
    for (std::size_t n = 0; n < horizon; ++n) {
      std::array<double, kActionCount> count{};
      for (std::size_t e = 0; e < n_elite; ++e) count[static_cast<int>(members[rank[e]][n])] += 1.0;
      const double denom = static_cast<double>(n_elite) + kActionCount * config.smoothing;
      for (int a = 0; a < kActionCount; ++a) result.distribution[n][a] = (count[a] + config.smoothing) / denom;
    }

    CemLogRow row;
    row.iteration = it + 1;
    row.best_fitness = result.best_evaluation.fitness;
    row.mean_fitness = sum / static_cast<double>(members.size());
    row.best_score = result.best_evaluation.score.normalized;
    result.log.push_back(row);
  }
  return result;
}

void write_training_log_csv(std::ostream& out, const std::vector<CemLogRow>& log) {
  out.precision(17);
  out << "iteration,best_fitness,mean_fitness,best_score\n";
  for (const CemLogRow& r : log) {
    out << r.iteration << ',' << r.best_fitness << ',' << r.mean_fitness << ',' << r.best_score << '\n';
  }
}

}  // namespace gauzecut
